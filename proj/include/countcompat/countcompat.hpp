#ifndef COUNTCOMPAT_COUNTCOMPAT_HPP
#define COUNTCOMPAT_COUNTCOMPAT_HPP

// Umbrella header.

#include "countcompat/compat.hpp"
#include "countcompat/distributions.hpp"
#include "countcompat/errors.hpp"
#include "countcompat/families.hpp"
#include "countcompat/joint_pmf.hpp"
#include "countcompat/lince.hpp"
#include "countcompat/model_config.hpp"
#include "countcompat/oracle.hpp"
#include "countcompat/rng.hpp"
#include "countcompat/series.hpp"
#include "countcompat/simplex.hpp"
#include "countcompat/simulate.hpp"

#endif
