#pragma once

#include "pst/errors.hpp"
#include "pst/spectra.hpp"
#include "pst/tridiagonal.hpp"
#include "pst/inverse_solver.hpp"
#include "pst/dynamics.hpp"
#include "pst/phase_protocol.hpp"
#include "pst/csv.hpp"
