#pragma once

#include "gravomit/error.hpp"
#include "gravomit/scalar.hpp"
#include "gravomit/units.hpp"
#include "gravomit/params.hpp"
#include "gravomit/config.hpp"
#include "gravomit/response.hpp"
#include "gravomit/perturbation.hpp"
#include "gravomit/noise.hpp"
#include "gravomit/oracle.hpp"
#include "gravomit/analysis.hpp"
#include "gravomit/history.hpp"
