#ifndef TENQR_TENQR_HPP
#define TENQR_TENQR_HPP

#include "tenqr/algebra.hpp"
#include "tenqr/completion.hpp"
#include "tenqr/data.hpp"
#include "tenqr/dft.hpp"
#include "tenqr/factor.hpp"
#include "tenqr/io.hpp"
#include "tenqr/pipeline.hpp"
#include "tenqr/sampling.hpp"
#include "tenqr/tensor.hpp"

#endif  // TENQR_TENQR_HPP
