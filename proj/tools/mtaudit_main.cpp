#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtaudit/audit.hpp"
#include "mtaudit/campaign.hpp"
#include "mtaudit/human_eval.hpp"
#include "mtaudit/metrics.hpp"
#include "mtaudit/power.hpp"
#include "mtaudit/report.hpp"
#include "mtaudit/stats.hpp"
#include "mtaudit/translationese.hpp"

namespace {

using namespace mtaudit;

struct IoOpts {
    std::string segments;
    std::string outputs;
    std::string judgments;
    std::string out;
    std::string format = "json";
};

struct QcFlags {
    double qc_alpha = 0.05;
    int qc_min_pairs = 10;
};

void add_io(CLI::App* cmd, IoOpts& io, bool with_inputs = true) {
    if (with_inputs) {
        cmd->add_option("--segments", io.segments, "segments JSONL file")->required();
        cmd->add_option("--outputs", io.outputs, "system outputs JSONL file")->required();
        cmd->add_option("--judgments", io.judgments, "judgments JSONL file")->required();
    }
    cmd->add_option("--out", io.out, "output file (default: stdout)");
    cmd->add_option("--format", io.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
}

void add_qc(CLI::App* cmd, QcFlags& qc) {
    cmd->add_option("--qc-alpha", qc.qc_alpha, "worker QC significance level");
    cmd->add_option("--qc-min-pairs", qc.qc_min_pairs,
                    "minimum degraded pairs for a worker to be assessable");
}

Campaign load(const IoOpts& io) {
    return load_campaign(io.segments, io.outputs, io.judgments);
}

QcOptions qc_options(const QcFlags& f) {
    QcOptions o;
    o.qc_alpha = f.qc_alpha;
    o.min_pairs = f.qc_min_pairs;
    return o;
}

Split parse_split(const std::string& s) {
    if (s == "forward") return Split::Forward;
    if (s == "reverse") return Split::Reverse;
    if (s == "both") return Split::Both;
    throw std::invalid_argument("unknown split \"" + s + "\"");
}

SplitMetric parse_metric(const std::string& s) {
    if (s == "da_raw") return SplitMetric::DaRaw;
    if (s == "da_z") return SplitMetric::DaZ;
    if (s == "bleu") return SplitMetric::Bleu;
    if (s == "unigram") return SplitMetric::UnigramPrecision;
    throw std::invalid_argument("unknown metric \"" + s + "\"");
}

TokenizerScheme parse_tokenizer(const std::string& s) {
    if (s == "default") return TokenizerScheme::Default;
    if (s == "whitespace") return TokenizerScheme::Whitespace;
    throw std::invalid_argument("unknown tokenizer \"" + s + "\"");
}

Cell cell(std::optional<double> v) {
    if (v) return *v;
    return std::monostate{};
}

Cell cell(double v) { return v; }
Cell cell(std::int64_t v) { return v; }
Cell cell(int v) { return static_cast<std::int64_t>(v); }
Cell cell(const std::string& v) { return v; }

void emit(const Report& rep, const IoOpts& io) {
    const std::string text = io.format == "csv" ? to_csv(rep) : to_json(rep);
    if (io.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(io.out);
        if (!f) throw ValidationError("cannot write " + io.out);
        f << text;
    }
}

void push_io_config(Report& rep, const std::string& sub, const IoOpts& io) {
    rep.config.emplace_back("subcommand", sub);
    rep.config.emplace_back("segments", io.segments);
    rep.config.emplace_back("outputs", io.outputs);
    rep.config.emplace_back("judgments", io.judgments);
}

void push_qc_config(Report& rep, const QcFlags& qc) {
    rep.config.emplace_back("qc_alpha", format_number(qc.qc_alpha));
    rep.config.emplace_back("qc_min_pairs", std::to_string(qc.qc_min_pairs));
}

// Per-segment mean raw scores for every system with at least one scored
// segment; the shared input of the effect/wilcoxon/cluster subcommands.
std::map<std::string, std::map<std::string, double>> per_system_segment_scores(
    const Campaign& c, const std::map<std::string, WorkerQC>& qc, Split split) {
    std::set<std::string> ids;
    for (const auto& o : c.outputs) ids.insert(o.system_id);
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& id : ids) {
        auto scores = segment_scores(c, qc, id, split);
        if (!scores.empty()) out.emplace(id, std::move(scores));
    }
    return out;
}

int run_validate(const IoOpts& io) {
    const Campaign c = load(io);
    const auto splits = split_segments(c);
    std::set<std::string> systems, workers;
    for (const auto& o : c.outputs) systems.insert(o.system_id);
    for (const auto& j : c.judgments) workers.insert(j.worker_id);
    std::cout << "OK: " << c.name << ": " << c.segments.size() << " segments ("
              << splits.at(Direction::Forward).size() << " forward, "
              << splits.at(Direction::Reverse).size() << " reverse), "
              << c.outputs.size() << " outputs (" << systems.size() << " systems), "
              << c.judgments.size() << " judgments (" << workers.size() << " workers)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mtaudit: audits MT evaluation campaigns"};
    app.require_subcommand(1);

    int rc = 0;
    auto set_action = [&](CLI::App* cmd, std::function<int()> fn) {
        cmd->callback([&rc, fn = std::move(fn)] { rc = fn(); });
    };

    // validate
    {
        auto* cmd = app.add_subcommand("validate", "check campaign files");
        auto io = std::make_shared<IoOpts>();
        add_io(cmd, *io);
        set_action(cmd, [io] { return run_validate(*io); });
    }

    // da
    {
        auto* cmd = app.add_subcommand("da", "direct-assessment system scores");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto split = std::make_shared<std::string>("both");
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--split", *split, "forward|reverse|both");
        set_action(cmd, [io, qcf, split] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const auto scores = system_scores(c, qc, parse_split(*split));
            Report rep;
            push_io_config(rep, "da", *io);
            rep.config.emplace_back("split", *split);
            push_qc_config(rep, *qcf);
            Table t;
            t.name = "systems";
            t.columns = {"system", "avg_raw", "avg_z", "n", "N"};
            for (const auto& s : scores) {
                t.rows.push_back({cell(s.system_id), cell(s.avg_raw), cell(s.avg_z),
                                  cell(s.n), cell(s.N)});
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // bleu
    {
        auto* cmd = app.add_subcommand("bleu", "corpus BLEU per system and split");
        auto io = std::make_shared<IoOpts>();
        auto tok = std::make_shared<std::string>("default");
        add_io(cmd, *io);
        cmd->add_option("--tokenizer", *tok, "default|whitespace");
        set_action(cmd, [io, tok] {
            const Campaign c = load(*io);
            const TokenizerScheme scheme = parse_tokenizer(*tok);
            const auto splits = split_segments(c);
            std::map<std::string, const Segment*> seg_by_id;
            for (const auto& s : c.segments) seg_by_id.emplace(s.segment_id, &s);
            std::set<std::string> ids;
            for (const auto& o : c.outputs) ids.insert(o.system_id);

            Report rep;
            push_io_config(rep, "bleu", *io);
            rep.config.emplace_back("tokenizer", *tok);
            Table t;
            t.name = "bleu";
            t.columns = {"system", "split", "bleu", "p1", "p2", "p3", "p4",
                         "brevity_penalty", "hyp_len", "ref_len"};
            const std::vector<std::pair<std::string, std::optional<Direction>>> sides = {
                {"forward", Direction::Forward},
                {"reverse", Direction::Reverse},
                {"both", std::nullopt}};
            for (const auto& id : ids) {
                for (const auto& [label, dir] : sides) {
                    std::vector<SentencePair> pairs;
                    for (const auto& o : c.outputs) {
                        if (o.system_id != id) continue;
                        if (dir && !splits.at(*dir).count(o.segment_id)) continue;
                        pairs.emplace_back(
                            tokenize(o.text, scheme),
                            tokenize(seg_by_id.at(o.segment_id)->reference_text, scheme));
                    }
                    if (pairs.empty()) continue;
                    const BleuReport b = corpus_bleu(pairs);
                    t.rows.push_back({cell(id), cell(label), cell(b.score),
                                      cell(b.precisions[0]), cell(b.precisions[1]),
                                      cell(b.precisions[2]), cell(b.precisions[3]),
                                      cell(b.brevity_penalty), cell(b.hyp_len),
                                      cell(b.ref_len)});
                }
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // lenstats
    {
        auto* cmd = app.add_subcommand("lenstats", "sentence-length statistics");
        auto io = std::make_shared<IoOpts>();
        auto side = std::make_shared<std::string>("reference");
        add_io(cmd, *io);
        cmd->add_option("--side", *side, "reference|source")
            ->check(CLI::IsMember({"reference", "source"}));
        set_action(cmd, [io, side] {
            const Campaign c = load(*io);
            const bool use_ref = *side == "reference";
            const std::string lang = use_ref ? c.target_lang : c.source_lang;
            Report rep;
            push_io_config(rep, "lenstats", *io);
            rep.config.emplace_back("side", *side);
            Table t;
            t.name = "lengths";
            t.columns = {"split", "lang", "count", "mean", "median", "q1", "q3"};
            const std::vector<std::pair<std::string, std::optional<Direction>>> sides = {
                {"forward", Direction::Forward},
                {"reverse", Direction::Reverse},
                {"both", std::nullopt}};
            for (const auto& [label, dir] : sides) {
                std::vector<std::string> texts;
                for (const auto& s : c.segments) {
                    if (dir && direction_of(s) != *dir) continue;
                    if (use_ref) {
                        texts.push_back(s.reference_text);
                    } else if (s.source_text) {
                        texts.push_back(*s.source_text);
                    }
                }
                if (texts.empty()) continue;
                const LengthStats ls = length_stats(texts, lang);
                t.rows.push_back({cell(label), cell(lang), cell(ls.count), cell(ls.mean),
                                  cell(ls.median), cell(ls.q1), cell(ls.q3)});
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // effect
    {
        auto* cmd = app.add_subcommand("effect", "pairwise effect-size matrix");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto split = std::make_shared<std::string>("both");
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--split", *split, "forward|reverse|both");
        set_action(cmd, [io, qcf, split] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const auto per_system = per_system_segment_scores(c, qc, parse_split(*split));
            const EffectMatrix em = effect_matrix(per_system);
            Report rep;
            push_io_config(rep, "effect", *io);
            rep.config.emplace_back("split", *split);
            push_qc_config(rep, *qcf);
            Table t;
            t.name = "effect";
            t.columns.push_back("system");
            for (const auto& id : em.system_ids) t.columns.push_back(id);
            for (std::size_t i = 0; i < em.system_ids.size(); ++i) {
                std::vector<Cell> row{cell(em.system_ids[i])};
                for (std::size_t j = 0; j < em.system_ids.size(); ++j) {
                    if (i == j) row.emplace_back(std::monostate{});
                    else row.push_back(cell(em.values[i][j]));
                }
                t.rows.push_back(std::move(row));
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // wilcoxon
    {
        auto* cmd = app.add_subcommand("wilcoxon", "pairwise rank-sum tests");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto split = std::make_shared<std::string>("both");
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--split", *split, "forward|reverse|both");
        set_action(cmd, [io, qcf, split] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const auto per_system = per_system_segment_scores(c, qc, parse_split(*split));
            std::vector<std::string> ids;
            for (const auto& [id, _] : per_system) ids.push_back(id);
            Report rep;
            push_io_config(rep, "wilcoxon", *io);
            rep.config.emplace_back("split", *split);
            push_qc_config(rep, *qcf);
            Table t;
            t.name = "tests";
            t.columns = {"system_a", "system_b", "u", "z", "p", "method"};
            for (std::size_t i = 0; i < ids.size(); ++i) {
                for (std::size_t j = i + 1; j < ids.size(); ++j) {
                    std::vector<double> a, b;
                    for (const auto& [seg, v] : per_system.at(ids[i])) a.push_back(v);
                    for (const auto& [seg, v] : per_system.at(ids[j])) b.push_back(v);
                    const RankSumResult r = rank_sum_test(a, b);
                    t.rows.push_back({cell(ids[i]), cell(ids[j]), cell(r.u_statistic),
                                      cell(r.z_value), cell(r.p_value),
                                      cell(to_string(r.method))});
                }
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // rankcorr
    {
        auto* cmd = app.add_subcommand("rankcorr", "forward/reverse ranking correlation");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto metric = std::make_shared<std::string>("da_raw");
        auto tok = std::make_shared<std::string>("default");
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--metric", *metric, "da_raw|da_z|bleu|unigram");
        cmd->add_option("--tokenizer", *tok, "default|whitespace");
        set_action(cmd, [io, qcf, metric, tok] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const auto scores =
                split_scores(c, qc, parse_metric(*metric), parse_tokenizer(*tok));
            int n_systems = 0;
            for (const auto& s : scores) {
                if (s.forward && s.reverse) ++n_systems;
            }
            const Correlations corr = ranking_correlation(scores);
            Report rep;
            push_io_config(rep, "rankcorr", *io);
            rep.config.emplace_back("metric", *metric);
            rep.config.emplace_back("tokenizer", *tok);
            push_qc_config(rep, *qcf);
            Table t;
            t.name = "correlation";
            t.columns = {"metric", "n_systems", "pearson", "spearman", "kendall"};
            t.rows.push_back({cell(*metric), cell(n_systems), cell(corr.pearson),
                              cell(corr.spearman), cell(corr.kendall)});
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // cluster
    {
        auto* cmd = app.add_subcommand("cluster", "significance clustering of systems");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto split = std::make_shared<std::string>("both");
        auto alpha = std::make_shared<double>(0.05);
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--split", *split, "forward|reverse|both");
        cmd->add_option("--alpha", *alpha, "significance level");
        set_action(cmd, [io, qcf, split, alpha] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const Split sp = parse_split(*split);
            const auto per_system = per_system_segment_scores(c, qc, sp);
            const Clustering cl = cluster_systems(per_system, *alpha);
            std::map<std::string, int> big_n;
            for (const auto& s : system_scores(c, qc, sp)) big_n[s.system_id] = s.N;
            Report rep;
            push_io_config(rep, "cluster", *io);
            rep.config.emplace_back("split", *split);
            rep.config.emplace_back("alpha", format_number(*alpha));
            push_qc_config(rep, *qcf);
            Table t;
            t.name = "clusters";
            t.columns = {"rank", "system", "mean_raw", "n", "N", "cluster",
                         "outperforms_all_lower"};
            int rank = 1;
            for (const auto& e : cl.entries) {
                t.rows.push_back({cell(rank++), cell(e.system_id), cell(e.mean_score),
                                  cell(e.n_segments), cell(big_n[e.system_id]),
                                  cell(e.cluster_index),
                                  cell(static_cast<std::int64_t>(e.outperforms_all_lower))});
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // power
    {
        auto* cmd = app.add_subcommand("power", "rank-sum test power");
        auto io = std::make_shared<IoOpts>();
        auto effect = std::make_shared<double>(0.0);
        auto n = std::make_shared<int>(0);
        auto alpha = std::make_shared<double>(0.05);
        auto reps = std::make_shared<long>(20000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto method = std::make_shared<std::string>("mc");
        auto grid = std::make_shared<bool>(false);
        add_io(cmd, *io, /*with_inputs=*/false);
        auto* eff_opt = cmd->add_option("--effect", *effect, "effect size in (0, 1)");
        auto* n_opt = cmd->add_option("--n", *n, "sample size per group");
        cmd->add_option("--alpha", *alpha, "significance level");
        cmd->add_option("--reps", *reps, "Monte Carlo replications");
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_option("--method", *method, "mc|analytic")
            ->check(CLI::IsMember({"mc", "analytic"}));
        cmd->add_flag("--grid", *grid, "emit the full power grid");
        set_action(cmd, [io, effect, n, alpha, reps, seed, method, grid, eff_opt, n_opt] {
            Report rep;
            rep.config.emplace_back("subcommand", "power");
            rep.config.emplace_back("method", *method);
            rep.config.emplace_back("alpha", format_number(*alpha));
            rep.config.emplace_back("reps", std::to_string(*reps));
            rep.config.emplace_back("seed", std::to_string(*seed));
            if (*grid) {
                const auto sizes = default_grid_sizes();
                const auto effects = default_grid_effects();
                const PowerMethod m = *method == "analytic" ? PowerMethod::Analytic
                                                            : PowerMethod::MonteCarlo;
                const PowerGrid g = power_grid(sizes, effects, *alpha, m, *reps, *seed);
                Table t;
                t.name = "power_grid";
                t.columns.push_back("n");
                char buf[16];
                for (double e : effects) {
                    std::snprintf(buf, sizeof buf, "%.3f", e);
                    t.columns.emplace_back(buf);
                }
                for (std::size_t i = 0; i < sizes.size(); ++i) {
                    std::vector<Cell> row{cell(sizes[i])};
                    for (const auto& est : g.cells[i]) row.push_back(cell(est.power));
                    t.rows.push_back(std::move(row));
                }
                rep.tables.push_back(std::move(t));
            } else {
                if (eff_opt->count() == 0 || n_opt->count() == 0) {
                    throw std::invalid_argument("power: --effect and --n are required "
                                                "unless --grid is given");
                }
                rep.config.emplace_back("effect", format_number(*effect));
                rep.config.emplace_back("n", std::to_string(*n));
                const PowerEstimate est =
                    *method == "analytic"
                        ? analytic_power(*effect, *n, *alpha)
                        : simulate_power(*effect, *n, *alpha, *reps, *seed);
                Table t;
                t.name = "power";
                t.columns = {"effect", "n",    "alpha",         "method",
                             "power",  "reps", "half_width_95"};
                t.rows.push_back(
                    {cell(est.effect), cell(est.n_per_group), cell(est.alpha),
                     cell(to_string(est.method)), cell(est.power),
                     est.method == PowerMethod::MonteCarlo ? cell(static_cast<std::int64_t>(est.reps))
                                                           : Cell{std::monostate{}},
                     est.method == PowerMethod::MonteCarlo ? cell(est.half_width_95)
                                                           : Cell{std::monostate{}}});
                rep.tables.push_back(std::move(t));
            }
            emit(rep, *io);
            return 0;
        });
    }

    // plan-n
    {
        auto* cmd = app.add_subcommand("plan-n", "minimum sample size for target power");
        auto io = std::make_shared<IoOpts>();
        auto effect = std::make_shared<double>(0.0);
        auto target = std::make_shared<double>(0.8);
        auto alpha = std::make_shared<double>(0.05);
        auto grid_step = std::make_shared<int>(55);
        auto max_n = std::make_shared<int>(10000);
        auto reps = std::make_shared<long>(20000);
        auto seed = std::make_shared<std::uint64_t>(1);
        auto method = std::make_shared<std::string>("analytic");
        add_io(cmd, *io, /*with_inputs=*/false);
        cmd->add_option("--effect", *effect, "effect size in (0, 1)")->required();
        cmd->add_option("--target-power", *target, "power to reach");
        cmd->add_option("--alpha", *alpha, "significance level");
        cmd->add_option("--grid-step", *grid_step, "candidate sizes are multiples of this");
        cmd->add_option("--max-n", *max_n, "give up beyond this size");
        cmd->add_option("--reps", *reps, "Monte Carlo replications");
        cmd->add_option("--seed", *seed, "RNG seed");
        cmd->add_option("--method", *method, "mc|analytic")
            ->check(CLI::IsMember({"mc", "analytic"}));
        set_action(cmd, [io, effect, target, alpha, grid_step, max_n, reps, seed, method] {
            PlanOptions plan;
            plan.target_power = *target;
            plan.alpha = *alpha;
            plan.grid_step = *grid_step;
            plan.max_n = *max_n;
            plan.method =
                *method == "analytic" ? PowerMethod::Analytic : PowerMethod::MonteCarlo;
            plan.reps = *reps;
            plan.seed = *seed;
            const std::optional<int> min_n = min_sample_size(*effect, plan);
            Report rep;
            rep.config.emplace_back("subcommand", "plan-n");
            rep.config.emplace_back("effect", format_number(*effect));
            rep.config.emplace_back("target_power", format_number(*target));
            rep.config.emplace_back("alpha", format_number(*alpha));
            rep.config.emplace_back("grid_step", std::to_string(*grid_step));
            rep.config.emplace_back("max_n", std::to_string(*max_n));
            rep.config.emplace_back("method", *method);
            rep.config.emplace_back("reps", std::to_string(*reps));
            rep.config.emplace_back("seed", std::to_string(*seed));
            Table t;
            t.name = "plan";
            t.columns = {"effect", "target_power", "min_n", "status"};
            t.rows.push_back({cell(*effect), cell(*target),
                              min_n ? cell(*min_n) : Cell{std::monostate{}},
                              cell(std::string(min_n ? "ok" : "unreachable"))});
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    // split
    {
        auto* cmd = app.add_subcommand("split", "forward/reverse split scores");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto metric = std::make_shared<std::string>("da_raw");
        auto tok = std::make_shared<std::string>("default");
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--metric", *metric, "da_raw|da_z|bleu|unigram");
        cmd->add_option("--tokenizer", *tok, "default|whitespace");
        set_action(cmd, [io, qcf, metric, tok] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const auto scores =
                split_scores(c, qc, parse_metric(*metric), parse_tokenizer(*tok));
            const std::string pair = c.source_lang + "-" + c.target_lang;
            const auto summary = rf_summary({{pair, scores}});
            Report rep;
            push_io_config(rep, "split", *io);
            rep.config.emplace_back("metric", *metric);
            rep.config.emplace_back("tokenizer", *tok);
            push_qc_config(rep, *qcf);
            Table systems;
            systems.name = "systems";
            systems.columns = {"system", "metric", "forward", "reverse", "diff"};
            for (const auto& s : scores) {
                systems.rows.push_back({cell(s.system_id), cell(to_string(s.metric)),
                                        cell(s.forward), cell(s.reverse), cell(s.diff)});
            }
            rep.tables.push_back(std::move(systems));
            Table sum;
            sum.name = "summary";
            sum.columns = {"language_pair", "pct_r_gt_f", "pct_f_gt_r",
                           "mean_diff",     "sd_diff",    "n_systems"};
            for (const auto& r : summary) {
                sum.rows.push_back({cell(r.language_pair), cell(r.pct_r_gt_f),
                                    cell(r.pct_f_gt_r), cell(r.mean_diff),
                                    cell(r.sd_diff), cell(r.n_systems)});
            }
            rep.tables.push_back(std::move(sum));
            emit(rep, *io);
            return 0;
        });
    }

    // pairdiff
    {
        auto* cmd = app.add_subcommand("pairdiff", "pairwise split score differences");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto metric = std::make_shared<std::string>("da_raw");
        auto tok = std::make_shared<std::string>("default");
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--metric", *metric, "da_raw|da_z|bleu|unigram");
        cmd->add_option("--tokenizer", *tok, "default|whitespace");
        set_action(cmd, [io, qcf, metric, tok] {
            const Campaign c = load(*io);
            const auto qc = qc_filter(c, qc_options(*qcf));
            const auto scores =
                split_scores(c, qc, parse_metric(*metric), parse_tokenizer(*tok));
            const PairDiffReport pd = pair_diffs(scores);
            Report rep;
            push_io_config(rep, "pairdiff", *io);
            rep.config.emplace_back("metric", *metric);
            rep.config.emplace_back("tokenizer", *tok);
            push_qc_config(rep, *qcf);
            Table pairs;
            pairs.name = "pairs";
            pairs.columns = {"system_a", "system_b", "forward_diff", "reverse_diff"};
            for (const auto& p : pd.pairs) {
                pairs.rows.push_back({cell(p.system_a), cell(p.system_b),
                                      cell(p.forward_diff), cell(p.reverse_diff)});
            }
            rep.tables.push_back(std::move(pairs));
            Table quad;
            quad.name = "quadrants";
            quad.columns = {"pos_pos", "pos_neg", "neg_pos", "neg_neg", "on_axis"};
            quad.rows.push_back({cell(pd.quadrants.pos_pos), cell(pd.quadrants.pos_neg),
                                 cell(pd.quadrants.neg_pos), cell(pd.quadrants.neg_neg),
                                 cell(pd.quadrants.on_axis)});
            rep.tables.push_back(std::move(quad));
            emit(rep, *io);
            return 0;
        });
    }

    // audit
    {
        auto* cmd = app.add_subcommand("audit", "nine-item campaign checklist");
        auto io = std::make_shared<IoOpts>();
        auto qcf = std::make_shared<QcFlags>();
        auto alpha = std::make_shared<double>(0.05);
        auto target = std::make_shared<double>(0.8);
        auto grid_step = std::make_shared<int>(55);
        auto max_n = std::make_shared<int>(10000);
        auto declare = std::make_shared<std::map<std::string, std::string>>();
        add_io(cmd, *io);
        add_qc(cmd, *qcf);
        cmd->add_option("--alpha", *alpha, "significance level");
        cmd->add_option("--target-power", *target, "power target for item 6");
        cmd->add_option("--grid-step", *grid_step, "sample-size planning grid step");
        cmd->add_option("--max-n", *max_n, "sample-size planning cap");
        cmd->add_option("--declare-judge-reliability", (*declare)["judge_reliability"],
                        "item 2 declaration");
        cmd->add_option("--declare-testing-level", (*declare)["testing_level"],
                        "item 3 declaration");
        cmd->add_option("--declare-language-pairs", (*declare)["language_pairs"],
                        "item 4 declaration");
        cmd->add_option("--declare-domain", (*declare)["domain"], "item 5 declaration");
        set_action(cmd, [io, qcf, alpha, target, grid_step, max_n, declare] {
            const Campaign c = load(*io);
            AuditOptions opt;
            opt.qc = qc_options(*qcf);
            opt.alpha = *alpha;
            opt.target_power = *target;
            opt.grid_step = *grid_step;
            opt.max_n = *max_n;
            auto lift = [&](const char* key) -> std::optional<std::string> {
                const std::string& v = (*declare)[key];
                if (v.empty()) return std::nullopt;
                return v;
            };
            opt.judge_reliability = lift("judge_reliability");
            opt.testing_level = lift("testing_level");
            opt.language_pairs = lift("language_pairs");
            opt.domain = lift("domain");
            const AuditReport ar = audit_campaign(c, opt);
            Report rep;
            push_io_config(rep, "audit", *io);
            rep.config.emplace_back("alpha", format_number(*alpha));
            rep.config.emplace_back("target_power", format_number(*target));
            rep.config.emplace_back("grid_step", std::to_string(*grid_step));
            rep.config.emplace_back("max_n", std::to_string(*max_n));
            push_qc_config(rep, *qcf);
            rep.config.emplace_back("campaign", ar.campaign_name);
            Table t;
            t.name = "checklist";
            t.columns = {"item", "name", "status", "detail"};
            for (const auto& item : ar.items) {
                t.rows.push_back({cell(item.number), cell(item.name),
                                  cell(to_string(item.status)), cell(item.detail)});
            }
            rep.tables.push_back(std::move(t));
            emit(rep, *io);
            return 0;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
