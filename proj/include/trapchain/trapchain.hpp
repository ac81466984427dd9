#pragma once

#include "trapchain/analysis.hpp"
#include "trapchain/bessel.hpp"
#include "trapchain/chain.hpp"
#include "trapchain/csv.hpp"
#include "trapchain/dynamics.hpp"
#include "trapchain/errors.hpp"
#include "trapchain/expm.hpp"
#include "trapchain/operators.hpp"
#include "trapchain/perturbation.hpp"
#include "trapchain/spectral.hpp"
#include "trapchain/version.hpp"
