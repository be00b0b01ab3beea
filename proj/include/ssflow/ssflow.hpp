#pragma once

#include "ssflow/continued_fraction.hpp"
#include "ssflow/diophantine.hpp"
#include "ssflow/dimensions.hpp"
#include "ssflow/errors.hpp"
#include "ssflow/explicit_formula.hpp"
#include "ssflow/flow.hpp"
#include "ssflow/io.hpp"
#include "ssflow/orbits.hpp"
#include "ssflow/polynomial.hpp"
#include "ssflow/zeta.hpp"
