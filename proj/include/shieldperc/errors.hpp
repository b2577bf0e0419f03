#ifndef SHIELDPERC_ERRORS_HPP
#define SHIELDPERC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shieldperc {

// Thrown when a computation would exceed a configured resource cap
// (DP state count, pair-sweep size, lattice memory, series iteration cap).
// The CLI maps this to exit code 2; domain errors map to exit code 1.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shieldperc

#endif
