#pragma once
// Adam with bias correction over a list of parameter tensors.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mcd {

struct AdamConfig {
    double learning_rate = 0.0002;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// One trainable tensor. The first `frozen` entries are never updated
// (embedding PAD rows).
struct ParamSlot {
    std::span<double> value;
    std::span<const double> grad;
    std::size_t frozen = 0;
};

class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    // t is the 1-based step count used for bias correction.
    void step(std::span<const ParamSlot> slots, std::size_t t) {
        if (m_.size() != slots.size()) {
            m_.assign(slots.size(), {});
            v_.assign(slots.size(), {});
        }
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t));
        for (std::size_t s = 0; s < slots.size(); ++s) {
            const ParamSlot& p = slots[s];
            auto& m = m_[s];
            auto& v = v_[s];
            if (m.size() != p.value.size()) {
                m.assign(p.value.size(), 0.0);
                v.assign(p.value.size(), 0.0);
            }
            for (std::size_t i = p.frozen; i < p.value.size(); ++i) {
                const double g = p.grad[i];
                m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
                v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                p.value[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
            }
        }
    }

    const AdamConfig& config() const noexcept { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace mcd
