#include "crackle/rng.hpp"

#include "crackle/errors.hpp"

namespace crackle {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw ParameterError("poisson mean must be non-negative");
    if (mean == 0.0) return 0;
    std::poisson_distribution<std::uint64_t> p(mean);
    return p(eng_);
}

std::uint64_t Rng::below(std::uint64_t m) {
    std::uniform_int_distribution<std::uint64_t> u(0, m - 1);
    return u(eng_);
}

const char* error_class_name(ErrorClass c) {
    switch (c) {
        case ErrorClass::Parameter: return "parameter";
        case ErrorClass::Domain: return "domain";
        case ErrorClass::Solver: return "solver";
        case ErrorClass::Structural: return "structural";
        case ErrorClass::Unsupported: return "unsupported";
        case ErrorClass::Config: return "config";
        case ErrorClass::Io: return "io";
    }
    return "unknown";
}

}  // namespace crackle
