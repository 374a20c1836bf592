#include "omcsim/grid.hpp"

#include <cmath>
#include <utility>

namespace omcsim {

FrequencyGrid::FrequencyGrid(std::vector<double> f_hz) : f_hz_(std::move(f_hz)) {
    if (f_hz_.empty()) throw ValidationError("frequency grid must not be empty");
    double prev = 0.0;
    for (double f : f_hz_) {
        if (!(f > prev))
            throw ValidationError("frequency grid must be strictly increasing and positive");
        prev = f;
    }
}

FrequencyGrid FrequencyGrid::make(double f_min_hz, double f_max_hz, std::size_t points,
                                  GridSpacing spacing) {
    if (!(f_min_hz > 0.0)) throw ValidationError("grid f_min must be > 0");
    if (!(f_max_hz > f_min_hz)) throw ValidationError("grid f_max must exceed f_min");
    if (points < 2) throw ValidationError("grid needs at least 2 points");

    std::vector<double> f(points);
    if (spacing == GridSpacing::Log) {
        const double lg0 = std::log(f_min_hz);
        const double step = (std::log(f_max_hz) - lg0) / double(points - 1);
        for (std::size_t i = 0; i < points; ++i) f[i] = std::exp(lg0 + step * double(i));
    } else {
        const double step = (f_max_hz - f_min_hz) / double(points - 1);
        for (std::size_t i = 0; i < points; ++i) f[i] = f_min_hz + step * double(i);
    }
    f.front() = f_min_hz;
    f.back() = f_max_hz;
    return FrequencyGrid(std::move(f));
}

}  // namespace omcsim
