#pragma once

#include "wperm/acceptance.hpp"
#include "wperm/asymptotics.hpp"
#include "wperm/config.hpp"
#include "wperm/errors.hpp"
#include "wperm/exact.hpp"
#include "wperm/gamma.hpp"
#include "wperm/harness.hpp"
#include "wperm/io.hpp"
#include "wperm/model.hpp"
#include "wperm/parallel.hpp"
#include "wperm/precise.hpp"
#include "wperm/rng.hpp"
#include "wperm/sampler.hpp"
#include "wperm/scalar.hpp"
#include "wperm/series.hpp"
#include "wperm/stats.hpp"
#include "wperm/version.hpp"
