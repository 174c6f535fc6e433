#pragma once

#include "tucker_ra/tensor.hpp"
#include "tucker_ra/svdrank.hpp"
#include "tucker_ra/tucker_model.hpp"
#include "tucker_ra/hosvd.hpp"
#include "tucker_ra/hooi.hpp"
#include "tucker_ra/random.hpp"
#include "tucker_ra/synth.hpp"
#include "tucker_ra/tnsr_io.hpp"
