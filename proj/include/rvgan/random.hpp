#pragma once

#include <random>
#include <sstream>
#include <string>

#include "rvgan/common.hpp"

namespace rvgan {

// Seeded RNG with a text-serializable state so training can resume
// reproducibly from a checkpoint.
class Rng {
public:
    Rng() : engine_(0x5eed) {}
    explicit Rng(uint64_t seed) : engine_(seed) {}

    real normal(real mean, real stddev) {
        std::normal_distribution<real> d(mean, stddev);
        return d(engine_);
    }

    real uniform(real lo, real hi) {
        std::uniform_real_distribution<real> d(lo, hi);
        return d(engine_);
    }

    // Uniform integer in [0, n).
    uint64_t index(uint64_t n) {
        std::uniform_int_distribution<uint64_t> d(0, n - 1);
        return d(engine_);
    }

    template <typename It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, engine_);
    }

    std::mt19937_64& engine() { return engine_; }

    std::string state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void set_state(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
        if (!is) throw IoError("Rng: malformed serialized state");
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace rvgan
