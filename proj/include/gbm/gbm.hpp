#pragma once

#include "gbm/analysis.hpp"
#include "gbm/core.hpp"
#include "gbm/io.hpp"
#include "gbm/mechanism.hpp"
#include "gbm/oracle.hpp"
#include "gbm/truthcheck.hpp"
