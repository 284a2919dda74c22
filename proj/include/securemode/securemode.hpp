#pragma once

#include "securemode/scalar.hpp"
#include "securemode/matrix.hpp"
#include "securemode/index_set.hpp"
#include "securemode/linalg.hpp"
#include "securemode/subspace.hpp"
#include "securemode/model.hpp"
#include "securemode/geocontrol.hpp"
#include "securemode/disting.hpp"
#include "securemode/simulate.hpp"
#include "securemode/estimate.hpp"
#include "securemode/model_io.hpp"
#include "securemode/report.hpp"
