#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reggan/core.hpp"
#include "reggan/imageio.hpp"
#include "reggan/losses.hpp"
#include "reggan/metrics.hpp"
#include "reggan/nets.hpp"
#include "reggan/noise.hpp"

namespace reggan::train {

enum class ModeKind { PIX2PIX, C, C_R, NC, NC_R };

ModeKind parse_mode(const std::string& s);
std::string to_string(ModeKind m);

/// Which networks and loss terms are active for a training mode.
struct ModeConfig {
    ModeKind kind = ModeKind::NC_R;

    bool uses_cycle() const { return kind == ModeKind::C || kind == ModeKind::C_R; }
    bool uses_registration() const { return kind == ModeKind::C_R || kind == ModeKind::NC_R; }
    bool uses_l1() const { return kind == ModeKind::PIX2PIX; }
    int n_generators() const { return uses_cycle() ? 2 : 1; }
    int n_discriminators() const { return uses_cycle() ? 2 : 1; }
};

struct OptimizerConfig {
    double lr = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double weight_decay = 1e-4;
    int batch_size = 1;

    void validate() const {
        if (!(lr > 0)) throw DataError("optimizer: lr must be positive");
        if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) {
            throw DataError("optimizer: betas must lie in [0, 1)");
        }
        if (batch_size != 1) throw DataError("optimizer: only batch_size 1 is supported");
    }
};

struct NetConfigs {
    nets::GeneratorSpec generator;
    nets::DiscriminatorSpec discriminator;
    nets::RegistrationNetSpec registration;
};

struct ExperimentConfig {
    std::string dataset_dir;
    ModeKind mode = ModeKind::NC_R;
    std::string noise = "0"; // 0..5 | na | unpaired | aligned
    std::uint64_t seed = 1;
    int epochs = 20;
    std::string out_dir;
    losses::LossWeights weights;
    OptimizerConfig optimizer;
    NetConfigs nets;
    losses::GanLoss gan_loss = losses::GanLoss::vanilla;
    bool noise_redraw_per_epoch = false;
    bool emit_error_maps = false;
    int error_map_pairs = 8;
    metrics::MetricsConfig metrics_cfg;

    void validate() const;
    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_json_file(const std::filesystem::path& path);
};

struct EpochRow {
    int epoch = 0;
    long step = 0;
    losses::LossReport train_means;
    double test_nmae = 0.0;
    double test_psnr = 0.0;
    double test_ssim = 0.0;
};

std::string curves_csv(const std::vector<EpochRow>& rows);

/// Owns the networks, optimizer state, rng, and curve history for one run.
/// One alternating update per step: discriminator(s) first, then the joint
/// generator-side step (G, F, R share a single backward pass).
class Trainer {
  public:
    /// train: corrupted training split (or clean when redrawing per epoch);
    /// test: clean evaluation split.
    Trainer(const ExperimentConfig& cfg, DatasetSplit train, DatasetSplit test,
            noise::PairingMode pairing);

    /// One optimization step on the pair at `index` of the current train set.
    losses::LossReport step_on(std::size_t index);

    /// Runs the remainder of the current epoch; returns per-term means.
    losses::LossReport run_epoch();

    /// Translation quality of G on the clean test split (R is never applied).
    metrics::MetricsReport evaluate();

    Image predict(const Image& source);

    void save_checkpoint(const std::filesystem::path& path) const;
    static std::unique_ptr<Trainer> load_checkpoint(const std::filesystem::path& path,
                                                    DatasetSplit train, DatasetSplit test);

    long step_count() const { return step_; }
    int epoch() const { return epoch_; }
    const std::vector<EpochRow>& history() const { return history_; }
    void push_history(EpochRow row) { history_.push_back(std::move(row)); }
    const ExperimentConfig& config() const { return cfg_; }

    bool has_registration() const { return reg_ != nullptr; }
    bool has_second_generator() const { return gen_back_ != nullptr; }
    std::int64_t param_count() const;

    /// Mean smoothness term over the last `epochs` recorded epochs.
    double recent_smoothness_mean(int epochs) const;

    nets::RegistrationNetT<float>* registration() { return reg_.get(); }

  private:
    friend struct TrainerIo;

    void start_epoch();
    nn::Tensor to_tensor(const Image& img) const;

    ExperimentConfig cfg_;
    ModeConfig mode_;
    noise::PairingMode pairing_;
    DatasetSplit base_train_; // kept only when redrawing noise per epoch
    std::vector<nn::Tensor> train_src_, train_tgt_;
    DatasetSplit test_;
    std::vector<nn::Tensor> test_src_;

    std::unique_ptr<nets::ResnetGeneratorT<float>> gen_;
    std::unique_ptr<nets::ResnetGeneratorT<float>> gen_back_;
    std::unique_ptr<nets::PatchDiscriminatorT<float>> disc_;
    std::unique_ptr<nets::PatchDiscriminatorT<float>> disc_back_;
    std::unique_ptr<nets::RegistrationNetT<float>> reg_;
    std::vector<nn::ParamT<float>*> disc_params_;
    std::vector<nn::ParamT<float>*> gen_params_;
    nn::AdamT<float> opt_disc_;
    nn::AdamT<float> opt_gen_;

    Rng train_rng_;
    long step_ = 0;
    int epoch_ = 0;
    std::vector<std::uint32_t> epoch_order_;
    std::size_t cursor_ = 0;
    std::vector<EpochRow> history_;
};

struct RunResult {
    metrics::MetricsReport final_metrics;
    std::vector<EpochRow> curves;
    std::filesystem::path out_dir;
};

/// Full experiment: load dataset, apply the noise protocol, train, evaluate
/// each epoch, and write curves.csv / report.json / checkpoint / logs.
RunResult run_experiment(const ExperimentConfig& cfg);

} // namespace reggan::train
