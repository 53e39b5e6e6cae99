#pragma once

#include "gfix/analysis.hpp"
#include "gfix/certify.hpp"
#include "gfix/chains.hpp"
#include "gfix/coefficients.hpp"
#include "gfix/error.hpp"
#include "gfix/gspace.hpp"
#include "gfix/maps.hpp"
#include "gfix/oracle.hpp"
#include "gfix/solver.hpp"
#include "gfix/version.hpp"
