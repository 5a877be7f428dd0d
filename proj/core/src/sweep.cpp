#include "lipsqml/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "lipsqml/bounds.hpp"
#include "lipsqml/parallel.hpp"

namespace lipsqml {

namespace {

int predict_raw(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                std::span<const double> raw) {
    return predict(circuit, params, rescale_to_angle_domain(raw), obs);
}

std::vector<double> grid(double step, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        // i * step rounds 3 * 0.05 to 0.15000000000000002; i / (1 / step) does not.
        g[i] = static_cast<double>(i) / std::round(1.0 / step);
    }
    return g;
}

} // namespace

std::string to_string(WorstCaseMode mode) {
    return mode == WorstCaseMode::per_point ? "per_point" : "per_dataset";
}

WorstCaseMode worst_case_mode_from_string(const std::string &name) {
    if (name == "per_point") {
        return WorstCaseMode::per_point;
    }
    if (name == "per_dataset") {
        return WorstCaseMode::per_dataset;
    }
    throw std::invalid_argument("unknown worst-case mode '" + name + "'");
}

double accuracy(const Circuit &circuit, const ModelParams &params, const Observable &obs,
                const Dataset &data, std::size_t threads) {
    if (data.empty()) {
        throw std::invalid_argument("accuracy: empty dataset");
    }
    std::vector<std::uint8_t> correct(data.size(), 0);
    parallel_for(data.size(), threads, [&](std::size_t k) {
        correct[k] = predict_raw(circuit, params, obs, data.point(k)) == data.label(k) ? 1 : 0;
    });
    const auto hits = std::count(correct.begin(), correct.end(), std::uint8_t{1});
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

WorstCaseOutcome worst_case_evaluate(const Circuit &circuit, const ModelParams &params,
                                     const Observable &obs, const Dataset &data,
                                     const NoiseBatch &noise, double eps, WorstCaseMode mode,
                                     double lipschitz_raw, std::size_t threads) {
    if (data.empty()) {
        throw std::invalid_argument("worst_case_accuracy: empty dataset");
    }
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("worst_case_accuracy: eps must be non-negative");
    }
    if (noise.points() != data.size() || noise.dim() != data.dim()) {
        throw std::invalid_argument("worst_case_accuracy: noise batch does not match dataset");
    }
    const std::size_t n = data.size();
    const std::size_t m = noise.samples();
    const double radius = lipschitz_raw * eps * std::sqrt(static_cast<double>(data.dim()));

    struct PointResult {
        std::uint8_t clean_correct = 0;
        std::uint8_t all_correct = 0;
        std::uint8_t certified = 0;
        std::uint8_t violated = 0;
        std::vector<std::uint8_t> sample_correct; // per_dataset only
    };
    std::vector<PointResult> points(n);

    parallel_for(n, threads, [&](std::size_t k) {
        auto &res = points[k];
        const auto x = data.point(k);
        const int y = data.label(k);
        const double f = forward(circuit, params, rescale_to_angle_domain(x), obs);
        const int clean = label_from_output(f);
        res.clean_correct = clean == y ? 1 : 0;
        res.certified = (eps > 0.0 && std::abs(f) > radius) ? 1 : 0;
        if (mode == WorstCaseMode::per_dataset) {
            res.sample_correct.assign(m, res.clean_correct);
        }
        bool all = res.clean_correct != 0;
        if (eps == 0.0) {
            res.all_correct = all ? 1 : 0;
            return;
        }
        std::vector<double> shifted(x.size());
        for (std::size_t s = 0; s < m; ++s) {
            if (mode == WorstCaseMode::per_point && !all && !res.certified) {
                break;
            }
            const auto u = noise.draw(k, s);
            for (std::size_t i = 0; i < x.size(); ++i) {
                shifted[i] = x[i] + eps * u[i];
            }
            const int label = predict_raw(circuit, params, obs, shifted);
            if (label != clean && res.certified) {
                res.violated = 1;
            }
            if (label != y) {
                all = false;
            }
            if (mode == WorstCaseMode::per_dataset) {
                res.sample_correct[s] = label == y ? 1 : 0;
            }
        }
        res.all_correct = all ? 1 : 0;
    });

    WorstCaseOutcome out;
    std::size_t clean_hits = 0;
    std::size_t robust_hits = 0;
    for (const auto &p : points) {
        clean_hits += p.clean_correct;
        robust_hits += p.all_correct;
        out.certified_points += p.certified;
        out.certificate_violations += p.violated;
    }
    const double dn = static_cast<double>(n);
    if (mode == WorstCaseMode::per_point) {
        out.accuracy = static_cast<double>(robust_hits) / dn;
    } else {
        double worst = static_cast<double>(clean_hits) / dn;
        if (eps > 0.0) {
            for (std::size_t s = 0; s < m; ++s) {
                std::size_t hits = 0;
                for (const auto &p : points) {
                    hits += p.sample_correct[s];
                }
                worst = std::min(worst, static_cast<double>(hits) / dn);
            }
        }
        out.accuracy = worst;
    }
    return out;
}

double worst_case_accuracy(const Circuit &circuit, const ModelParams &params,
                           const Observable &obs, const Dataset &data, double eps,
                           std::size_t samples, std::uint64_t seed, WorstCaseMode mode,
                           std::size_t threads) {
    const NoiseBatch noise(data.size(), samples, data.dim(), seed);
    const double l_raw = kAngleScale * lipschitz_tight(circuit, params, obs);
    return worst_case_evaluate(circuit, params, obs, data, noise, eps, mode, l_raw, threads)
        .accuracy;
}

std::vector<double> default_eps_grid() { return grid(0.02, 11); }

std::vector<double> default_lambda_grid() { return grid(0.05, 11); }

SweepResult robustness_sweep(const std::vector<TrainedModel> &models, const Dataset &test,
                             const RobustnessOptions &options) {
    SweepResult result{"eps_bar", {}};
    const NoiseBatch noise(test.size(), options.samples, test.dim(), options.noise_seed);
    for (const auto &model : models) {
        const double tight = lipschitz_tight(model.circuit, model.params, model.obs);
        const double simple = lipschitz_simple(model.circuit, model.params, model.obs);
        const double clean =
            accuracy(model.circuit, model.params, model.obs, test, options.threads);
        for (double eps : options.eps_grid) {
            const auto outcome =
                worst_case_evaluate(model.circuit, model.params, model.obs, test, noise, eps,
                                    options.mode, kAngleScale * tight, options.threads);
            if (outcome.certificate_violations != 0) {
                throw std::logic_error("Lipschitz certificate violated for model '" + model.id +
                                       "' at eps " + format_double(eps));
            }
            SweepRecord r;
            r.model_id = model.id;
            r.lambda = model.lambda;
            r.eps_bar = eps;
            r.train_acc = model.train_accuracy;
            r.test_acc = clean;
            r.worst_case_acc = outcome.accuracy;
            r.lipschitz_tight = tight;
            r.lipschitz_simple = simple;
            r.seed = options.noise_seed;
            result.records.push_back(std::move(r));
        }
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const SweepRecord &a, const SweepRecord &b) {
                         if (a.eps_bar != b.eps_bar) {
                             return a.eps_bar < b.eps_bar;
                         }
                         return a.model_id < b.model_id;
                     });
    return result;
}

GeneralizationSweep generalization_sweep(const std::vector<double> &lambda_grid,
                                         const Circuit &circuit, const Observable &obs,
                                         const TrainConfig &train_config, const Dataset &train,
                                         const Dataset &test, const std::string &id_prefix,
                                         std::size_t threads, const SweepProgress &progress) {
    if (lambda_grid.empty()) {
        throw std::invalid_argument("generalization_sweep: empty lambda grid");
    }
    const std::size_t count = lambda_grid.size();
    std::vector<TrainedModel> models(count);
    std::vector<SweepRecord> records(count);
    std::vector<TrainResult> trainings(count);
    std::mutex progress_mutex;
    parallel_for(count, threads, [&](std::size_t i) {
        TrainConfig cfg = train_config;
        cfg.lambda = lambda_grid[i];
        cfg.threads = 1;
        TrainResult trained = lipsqml::train(circuit, obs, train, cfg);

        TrainedModel model;
        model.id = id_prefix + "-lambda-" + format_double(cfg.lambda);
        model.circuit = circuit;
        model.params = trained.best_params;
        model.obs = obs;
        model.lambda = cfg.lambda;
        model.seed = cfg.seed;
        model.train_accuracy = accuracy(circuit, model.params, obs, train);

        SweepRecord r;
        r.model_id = model.id;
        r.lambda = cfg.lambda;
        r.eps_bar = 0.0;
        r.train_acc = model.train_accuracy;
        r.test_acc = accuracy(circuit, model.params, obs, test);
        r.worst_case_acc = r.test_acc;
        r.lipschitz_tight = trained.lipschitz_bound;
        r.lipschitz_simple = lipschitz_simple(circuit, model.params, obs);
        r.seed = cfg.seed;

        if (progress) {
            const std::lock_guard lock(progress_mutex);
            progress(r);
        }
        models[i] = std::move(model);
        records[i] = std::move(r);
        trainings[i] = std::move(trained);
    });
    return {SweepResult{"lambda", std::move(records)}, std::move(models), std::move(trainings)};
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream &out, const SweepResult &result) {
    out << "model_id,lambda,eps_bar,train_acc,test_acc,worst_case_acc,lipschitz_tight,"
           "lipschitz_simple,seed\n";
    for (const auto &r : result.records) {
        out << r.model_id << ',' << format_double(r.lambda) << ',' << format_double(r.eps_bar)
            << ',' << format_double(r.train_acc) << ',' << format_double(r.test_acc) << ','
            << format_double(r.worst_case_acc) << ',' << format_double(r.lipschitz_tight) << ','
            << format_double(r.lipschitz_simple) << ',' << r.seed << '\n';
    }
}

void write_sweep_gnuplot(std::ostream &out, const SweepResult &result) {
    // Group by model, keeping first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const SweepRecord *>> groups;
    for (const auto &r : result.records) {
        auto [it, inserted] = groups.try_emplace(r.model_id);
        if (inserted) {
            order.push_back(r.model_id);
        }
        it->second.push_back(&r);
    }
    bool first = true;
    for (const auto &id : order) {
        if (!first) {
            out << "\n\n";
        }
        first = false;
        out << "# model " << id << "\n# " << result.axis
            << " train_acc test_acc worst_case_acc lipschitz_tight lipschitz_simple\n";
        for (const auto *r : groups[id]) {
            const double axis = result.axis == "lambda" ? r->lambda : r->eps_bar;
            out << format_double(axis) << ' ' << format_double(r->train_acc) << ' '
                << format_double(r->test_acc) << ' ' << format_double(r->worst_case_acc) << ' '
                << format_double(r->lipschitz_tight) << ' ' << format_double(r->lipschitz_simple)
                << '\n';
        }
    }
}

double spearman_correlation(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("spearman_correlation: need two equal-length samples");
    }
    auto ranks = [](const std::vector<double> &v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
                ++j;
            }
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double mean = (n + 1.0) / 2.0;
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - mean) * (rb[i] - mean);
        va += (ra[i] - mean) * (ra[i] - mean);
        vb += (rb[i] - mean) * (rb[i] - mean);
    }
    if (va == 0.0 || vb == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return cov / std::sqrt(va * vb);
}

} // namespace lipsqml
