#pragma once

#include <stdexcept>
#include <string>

namespace relaxbench {

// Uniform cell-centered grid on [0, length]: cell j owns x(j) = (j + 1/2) dx.
struct Grid {
    double length;
    int n_cells;
    double dx;

    Grid(double length_, int n_cells_) : length(length_), n_cells(n_cells_) {
        if (!(length > 0.0))
            throw std::invalid_argument("Grid: length must be positive");
        if (n_cells < 1)
            throw std::invalid_argument("Grid: n_cells must be >= 1");
        dx = length / n_cells;
    }

    double x(int j) const { return (j + 0.5) * dx; }
};

enum class SystemKind { TwoByTwo, ThreeByThree };

inline const char* system_name(SystemKind s) {
    return s == SystemKind::TwoByTwo ? "2x2" : "3x3";
}

// Raised when a time stepper or scalar solve fails; carries the failing
// time and cell so the caller can report it.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& msg, double time, int cell)
        : std::runtime_error(msg + " (t=" + std::to_string(time) +
                             ", cell=" + std::to_string(cell) + ")"),
          time(time), cell(cell) {}

    double time;
    int cell;
};

} // namespace relaxbench
