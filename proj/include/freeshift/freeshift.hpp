#pragma once

#include "freeshift/error.hpp"
#include "freeshift/word.hpp"
#include "freeshift/quotient.hpp"
#include "freeshift/potential.hpp"
#include "freeshift/transfer.hpp"
#include "freeshift/pressure.hpp"
#include "freeshift/spectra.hpp"
#include "freeshift/diagnostics.hpp"
#include "freeshift/io.hpp"
