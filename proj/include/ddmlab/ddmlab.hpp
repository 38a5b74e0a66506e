#pragma once

#include <ddmlab/analysis.hpp>
#include <ddmlab/coarse.hpp>
#include <ddmlab/decompose.hpp>
#include <ddmlab/discretize.hpp>
#include <ddmlab/krylov.hpp>
#include <ddmlab/la/csr.hpp>
#include <ddmlab/la/dense.hpp>
#include <ddmlab/la/eig.hpp>
#include <ddmlab/la/factor.hpp>
#include <ddmlab/la/matrix_market.hpp>
#include <ddmlab/report.hpp>
#include <ddmlab/schwarz.hpp>
