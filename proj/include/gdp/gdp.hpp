#pragma once

#include "gdp/csv.hpp"
#include "gdp/distributions.hpp"
#include "gdp/errors.hpp"
#include "gdp/gibbs.hpp"
#include "gdp/hyper.hpp"
#include "gdp/manifest.hpp"
#include "gdp/map.hpp"
#include "gdp/metrics.hpp"
#include "gdp/model.hpp"
#include "gdp/rng.hpp"
#include "gdp/special.hpp"
