#pragma once

#include "crdm/csv.hpp"
#include "crdm/fields.hpp"
#include "crdm/grid.hpp"
#include "crdm/kernels.hpp"
#include "crdm/measure.hpp"
#include "crdm/observables.hpp"
#include "crdm/quadrature.hpp"
#include "crdm/spectral.hpp"
#include "crdm/types.hpp"
