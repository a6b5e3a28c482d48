#pragma once
// Shared training contract: full-batch (or mini-batch) Adam with early
// stopping on validation loss, returning the best-epoch parameters.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcd/adam.hpp"
#include "mcd/errors.hpp"
#include "mcd/matrix.hpp"

namespace mcd {

struct TrainConfig {
    double learning_rate = 0.0002;
    std::size_t max_epochs = 10000;
    std::size_t patience = 400;
    std::size_t batch_size = 0;  // 0 = full set
    std::uint64_t seed = 0;
    std::size_t d_emb = 100;
    std::size_t d_hidden = 100;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double validation_fraction = 0.125;  // carved from the training split; 0 = monitor training loss

    void validate() const {
        if (!(learning_rate > 0) || max_epochs == 0 || patience == 0 || d_emb == 0 || d_hidden == 0)
            throw ConfigError("learning_rate, max_epochs, patience, d_emb and d_hidden must be positive");
        if (patience >= max_epochs) throw ConfigError("patience must be smaller than max_epochs");
        if (!(beta1 > 0 && beta1 < 1 && beta2 > 0 && beta2 < 1 && adam_epsilon > 0))
            throw ConfigError("Adam betas must lie in (0, 1) and epsilon must be positive");
        if (!(validation_fraction >= 0 && validation_fraction < 1))
            throw ConfigError("validation_fraction must lie in [0, 1)");
    }

    AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_epsilon}; }
};

struct EpochRecord {
    std::size_t epoch;
    double train_loss;
    double val_loss;
    double val_acc;
};

struct TrainingHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // index into epochs

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(17);
        os << "epoch,train_loss,val_loss,val_acc\n";
        for (const auto& e : epochs) os << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.val_acc << '\n';
        return os.str();
    }

    friend bool operator==(const TrainingHistory& a, const TrainingHistory& b) {
        if (a.best_epoch != b.best_epoch || a.epochs.size() != b.epochs.size()) return false;
        for (std::size_t i = 0; i < a.epochs.size(); ++i) {
            const auto &x = a.epochs[i], &y = b.epochs[i];
            if (x.epoch != y.epoch || x.train_loss != y.train_loss || x.val_loss != y.val_loss || x.val_acc != y.val_acc)
                return false;
        }
        return true;
    }
};

template <typename Params>
struct TrainedModel {
    Params params;
    TrainingHistory history;
};

struct ValidationSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;  // empty => monitor the training set
};

inline ValidationSplit split_validation(std::size_t n, double fraction, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto rng = make_rng(seed, 0x76616cULL);
    shuffle_deterministic(idx, rng);
    const auto n_val = static_cast<std::size_t>(static_cast<double>(n) * fraction);
    ValidationSplit s;
    if (n_val == 0 || n_val >= n) {
        s.train = idx;
    } else {
        s.val.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
        s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    return s;
}

inline void require_both_classes(std::span<const int> labels) {
    bool pos = false, neg = false;
    for (int y : labels) (y ? pos : neg) = true;
    if (!pos || !neg) throw DegenerateLabels("training labels contain a single class");
}

struct LossAcc {
    double loss;
    double acc;
};

// Params must expose tensors() -> vector<span<double>>, frozen_prefixes()
// -> vector<size_t> and zeros_like() -> Params.
//   loss_grad(params, batch, grad) -> mean training loss over batch, writes grad
//   evaluate(params, indices)       -> loss and accuracy over indices
template <typename Params, typename LossGrad, typename Evaluate>
TrainedModel<Params> train_with_early_stopping(Params params, const TrainConfig& cfg, std::span<const std::size_t> train,
                                               std::span<const std::size_t> val, LossGrad&& loss_grad,
                                               Evaluate&& evaluate) {
    cfg.validate();
    Adam adam(cfg.adam());
    Params grad = params.zeros_like();
    TrainedModel<Params> best{params, {}};
    double best_loss = std::numeric_limits<double>::infinity();
    auto rng = make_rng(cfg.seed, 0x62617463ULL);
    std::vector<std::size_t> order(train.begin(), train.end());
    const std::span<const std::size_t> monitor = val.empty() ? train : val;
    std::size_t step = 0;

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const std::size_t bs = cfg.batch_size == 0 ? order.size() : std::min(cfg.batch_size, order.size());
        if (bs < order.size()) shuffle_deterministic(order, rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t len = std::min(bs, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            loss_sum += loss_grad(static_cast<const Params&>(params), batch, grad);
            ++batches;
            auto values = params.tensors();
            auto grads = grad.tensors();
            auto frozen = params.frozen_prefixes();
            std::vector<ParamSlot> slots;
            slots.reserve(values.size());
            for (std::size_t k = 0; k < values.size(); ++k) slots.push_back({values[k], grads[k], frozen[k]});
            adam.step(slots, ++step);
        }
        const LossAcc v = evaluate(static_cast<const Params&>(params), monitor);
        best.history.epochs.push_back({epoch, loss_sum / static_cast<double>(batches), v.loss, v.acc});
        if (v.loss < best_loss) {
            best_loss = v.loss;
            best.params = params;
            best.history.best_epoch = epoch;
        } else if (epoch - best.history.best_epoch >= cfg.patience) {
            break;
        }
    }
    return best;
}

}  // namespace mcd
