#pragma once

#include <complex>

#include <doctest.h>

#include "plasmon_ddi/types.hpp"

namespace test
{
    inline double rel(std::complex<double> got, std::complex<double> want)
    {
        return std::abs(got - want) / std::abs(want);
    }

    inline double rel(double got, double want)
    {
        return std::abs(got - want) / std::abs(want);
    }
}
