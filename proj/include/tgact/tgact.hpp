#pragma once

#include "tgact/linalg.hpp"
#include "tgact/lie.hpp"
#include "tgact/rep.hpp"
#include "tgact/slice.hpp"
#include "tgact/grothendieck.hpp"
#include "tgact/manifold.hpp"
#include "tgact/config.hpp"
#include "tgact/report.hpp"
#include "tgact/runner.hpp"
