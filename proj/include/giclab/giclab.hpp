#pragma once

#include "channel_model.hpp"
#include "gaussian_rates.hpp"
#include "hk_lp.hpp"
#include "boundary_tracer.hpp"
#include "timeshare_envelope.hpp"
#include "spectral.hpp"
#include "variational_verifier.hpp"
#include "mc_oracle.hpp"
#include "converse_checks.hpp"
#include "verify_suites.hpp"
