#include "alebo/sobol.hpp"

#include <boost/random/sobol.hpp>

namespace alebo {

struct SobolSequence::Engine {
    explicit Engine(int dim) : qrng(static_cast<std::size_t>(dim)) {}
    boost::random::sobol qrng;
};

SobolSequence::SobolSequence(int dim, bool scramble, std::uint64_t seed) : dim_(dim) {
    if (dim < 1) throw DimensionError("SobolSequence: dimension must be positive");
    engine_ = std::make_unique<Engine>(dim);
    shifts_.assign(static_cast<std::size_t>(dim), 0);
    if (scramble) {
        Rng rng = make_rng(seed);
        for (auto& s : shifts_) s = rng();
    }
}

SobolSequence::~SobolSequence() = default;
SobolSequence::SobolSequence(SobolSequence&&) noexcept = default;
SobolSequence& SobolSequence::operator=(SobolSequence&&) noexcept = default;

Vector SobolSequence::next() {
    constexpr double kTwoPow64 = 18446744073709551616.0;
    Vector u(dim_);
    for (int j = 0; j < dim_; ++j) {
        const std::uint64_t bits = static_cast<std::uint64_t>(engine_->qrng()) ^ shifts_[static_cast<std::size_t>(j)];
        // Keep 53 bits so the result stays strictly below 1.
        u(j) = static_cast<double>(bits >> 11) * (2048.0 / kTwoPow64);
    }
    return u;
}

Matrix SobolSequence::draw(Index n) {
    Matrix out(n, dim_);
    for (Index i = 0; i < n; ++i) out.row(i) = next().transpose();
    return out;
}

Matrix sobol_box_points(int dim, Index n, bool scramble, std::uint64_t seed) {
    SobolSequence seq(dim, scramble, seed);
    return (2.0 * seq.draw(n).array() - 1.0).matrix();
}

}  // namespace alebo
