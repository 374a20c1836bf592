#pragma once

#include <cstddef>
#include <vector>

#include "omcsim/constants.hpp"
#include "omcsim/errors.hpp"

namespace omcsim {

enum class GridSpacing { Log, Linear };

/// Strictly increasing, strictly positive analysis frequencies [Hz].
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    explicit FrequencyGrid(std::vector<double> f_hz);

    static FrequencyGrid make(double f_min_hz, double f_max_hz, std::size_t points,
                              GridSpacing spacing);

    const std::vector<double>& f_hz() const { return f_hz_; }
    std::size_t size() const { return f_hz_.size(); }
    double operator[](std::size_t i) const { return f_hz_[i]; }
    double omega(std::size_t i) const { return two_pi * f_hz_[i]; }

    auto begin() const { return f_hz_.begin(); }
    auto end() const { return f_hz_.end(); }

private:
    std::vector<double> f_hz_;
};

}  // namespace omcsim
