#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "neglectnet/data_synth.hpp"
#include "neglectnet/discriminator.hpp"
#include "neglectnet/generator.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

struct LossWeights {
    Real lambda_f = 100;  // background L1
    Real lambda_s = 100;  // mask L1

    void validate() const;
};

struct GeneratorLoss {
    Tensor total;
    Tensor adversarial;
    Tensor l1_y;
    Tensor l1_z;  // undefined without a mask prediction
};

/// -log d_fake + lambda_f * |y_g - y_p| + lambda_s * |z_g - z_p|, each term a
/// batch mean. Pass undefined z tensors for the baseline generator.
GeneratorLoss generator_loss(const Tensor& d_fake, const Tensor& y_p, const Tensor& y_g, const Tensor& z_p,
                             const Tensor& z_g, const LossWeights& w);

/// Batch mean of -(log d_real + log(1 - d_fake)).
Tensor discriminator_loss(const Tensor& d_real, const Tensor& d_fake);

struct AdamState {
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    int64_t step = 0;
    std::vector<std::vector<Real>> m;  // one buffer per parameter, store order
    std::vector<std::vector<Real>> v;
};

AdamState make_adam(const ParamStore& params, double beta1 = 0.5, double beta2 = 0.999, double eps = 1e-8);

/// Bias-corrected Adam update of every parameter from its gradient buffer.
/// A parameter without a gradient is updated as if its gradient were zero.
void adam_step(AdamState& state, ParamStore& params, double lr);

struct TrainConfig {
    NetConfig net;
    LossWeights weights;
    int64_t steps = 1000;
    int batch_size = 8;
    double lr = 1e-4;  // generator; the discriminator uses lr / 2
    double beta1 = 0.5;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    bool augment = false;
    AugmentConfig augment_config;
    uint64_t seed = 1;
    int64_t checkpoint_every = 0;  // 0 disables periodic checkpoints

    void validate() const;
};

struct TrainState {
    GeneratorParams g;
    DiscriminatorParams d;
    AdamState adam_g;
    AdamState adam_d;
    int64_t step = 0;
};

TrainState init_training(const TrainConfig& config);

struct StepRecord {
    int64_t step = 0;  // 1-based index of the completed step
    double l_g = 0;
    double l_adv = 0;
    double l1_y = 0;
    double l1_z = 0;
    double l_d = 0;
    double d_real = 0;
    double d_fake = 0;
    double lr_g = 0;
    double lr_d = 0;
};

struct TrainReport {
    std::vector<StepRecord> records;

    void write_csv(const std::string& path) const;
    static const char* csv_header();
    static std::string csv_row(const StepRecord& r);
};

/// Indices of the samples used at step `step` (0-based). Every epoch visits
/// the dataset in a fresh permutation keyed by the seed; the sequence is a
/// pure function of (seed, dataset size, batch size, step).
std::vector<int64_t> batch_indices(uint64_t seed, int64_t dataset_size, int batch_size, int64_t step);

/// One discriminator update at lr / 2 on a detached y_p, then one generator
/// update at lr with the discriminator frozen.
StepRecord train_step(TrainState& state, const TrainConfig& config, const Batch& batch);

struct TrainHooks {
    std::function<void(const StepRecord&)> on_step;
    std::function<void(const TrainState&)> on_checkpoint;
};

/// Runs steps state.step + 1 .. config.steps. Throws NumericError on a
/// non-finite loss or gradient; the caller keeps whatever was checkpointed.
TrainReport train(TrainState& state, const TrainConfig& config, const std::vector<Sample>& dataset,
                  const TrainHooks& hooks = {});

}  // namespace neglectnet
