#ifndef NEGQED_NEGQED_HPP
#define NEGQED_NEGQED_HPP

#include "errors.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "material.hpp"
#include "layered_green.hpp"
#include "cavity_green.hpp"
#include "rates.hpp"
#include "dynamics.hpp"
#include "realism.hpp"
#include "config.hpp"

#endif  // NEGQED_NEGQED_HPP
