#pragma once

#include "mcmc_certify/errors.hpp"
#include "mcmc_certify/spectral_core.hpp"
#include "mcmc_certify/convergence.hpp"
#include "mcmc_certify/exact_error.hpp"
#include "mcmc_certify/bounds.hpp"
#include "mcmc_certify/burnin.hpp"
#include "mcmc_certify/simulate.hpp"
#include "mcmc_certify/validation.hpp"
#include "mcmc_certify/chain_io.hpp"
