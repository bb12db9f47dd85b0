#pragma once

#include "sticky/convergence.hpp"
#include "sticky/curve.hpp"
#include "sticky/errors.hpp"
#include "sticky/expm.hpp"
#include "sticky/fdref.hpp"
#include "sticky/generator.hpp"
#include "sticky/grid.hpp"
#include "sticky/measures.hpp"
#include "sticky/model.hpp"
#include "sticky/numerics.hpp"
#include "sticky/simulate.hpp"
#include "sticky/solve.hpp"
#include "sticky/spectral.hpp"
