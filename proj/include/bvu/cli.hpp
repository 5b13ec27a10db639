#pragma once

// Command implementations behind the `bvu` executable. Each command writes
// its payload to `out` (or to --output), diagnostics to `err`, and returns
// the process exit code.

#include <bvu/approx.hpp>
#include <bvu/errors.hpp>
#include <bvu/exact.hpp>
#include <bvu/generate.hpp>
#include <bvu/io.hpp>
#include <bvu/model.hpp>
#include <bvu/monte_carlo.hpp>
#include <bvu/reductions.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvu::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kInvalidInput = 2,
    kSizeLimit = 3,
    kVerifyFailed = 4,
};

inline constexpr double kExactTolerance = 1e-9;
inline constexpr double kMcHalfWidths = 4.0;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string output;  ///< empty: write to stdout
    bool quiet = false;
    bool timing = true;  ///< false: runtime fields are written as 0
};

struct GenerateOptions {
    std::string kind = "random";  ///< random | dsum-gadget | case1-friendly
    std::string name;
    RandomInstanceParams random;
    DSumInstance dsum;
    double alpha_target = 2.0;
    Case1FriendlyParams case1;
};

struct SolveOptions {
    std::string instance_path;
    std::string method = "exact";
    double epsilon = 0.25;
    bool theoretical = false;
    std::size_t max_items = ExactConfig{}.max_items;
};

struct VerifyOptions {
    std::string instance_path;
    std::string solution_path;
    std::size_t samples = 100'000;
};

struct ReduceOptions {
    std::string instance_path;
    std::string target;  ///< ku | mku
    long long alpha = 0;
    std::size_t j0 = 1;  ///< 1-based
};

struct BenchOptions {
    std::string dir;
    std::vector<std::string> methods{"exact", "approx"};
    std::vector<double> epsilons{0.25};
    bool theoretical = false;
    std::size_t max_items = ExactConfig{}.max_items;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void emit(const GlobalOptions& g, std::ostream& out, const std::string& text) {
    if (g.output.empty()) {
        out << text;
        return;
    }
    std::ofstream f(g.output, std::ios::binary);
    if (!f) throw io_error("cannot write " + g.output);
    f << text;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Maps exceptions to exit codes, reporting the message on `err`.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const invalid_instance& e) {
        err << "invalid instance:\n";
        for (const auto& v : e.violations()) err << "  - " << v << "\n";
        return kInvalidInput;
    } catch (const size_limit_exceeded& e) {
        err << "size limit: " << e.what() << "\n";
        return kSizeLimit;
    } catch (const state_space_overflow& e) {
        err << "size limit: " << e.what() << "\n";
        return kSizeLimit;
    } catch (const format_error& e) {
        err << "parse error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const io_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const precision_loss& e) {
        err << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::out_of_range& e) {
        err << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const nlohmann::json::exception& e) {
        err << "parse error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
}

inline InstanceFile load_instance(const std::string& path) {
    InstanceFile f = parse_instance(read_file(path));
    require_valid(f.instance);
    return f;
}

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        if (!enabled_) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

inline BribeSolution run_method(const ElectionInstance& inst, const std::string& method, double epsilon,
                                bool theoretical, std::size_t max_items) {
    if (method == "exact") {
        ExactConfig cfg;
        cfg.max_items = max_items;
        return solve_bvu_exact(inst, cfg);
    }
    if (method == "approx") {
        ApproxConfig cfg;
        cfg.epsilon = epsilon;
        cfg.theoretical_mode = theoretical;
        return solve_bvu_approx(inst, cfg);
    }
    throw std::invalid_argument("unknown method '" + method + "' (expected exact or approx)");
}

/// Shortest text that reads back as the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace detail

inline int cmd_generate(const GenerateOptions& opt, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        Json meta;
        if (!opt.name.empty()) meta["name"] = opt.name;
        meta["seed"] = g.seed;
        meta["generator"] = opt.kind;
        ElectionInstance inst;
        if (opt.kind == "random") {
            inst = random_instance(opt.random, g.seed);
        } else if (opt.kind == "dsum-gadget") {
            const GadgetInstance gi = dsum_gadget_instance(opt.dsum, opt.alpha_target);
            inst = gi.election;
            meta["dsum"] = Json{{"xs", opt.dsum.xs}, {"t", opt.dsum.t}, {"d", opt.dsum.d}};
            meta["gap_certificate"] = Json{{"alpha_target", opt.alpha_target},
                                           {"omega", gi.gadget.omega},
                                           {"M", gi.gadget.big_m},
                                           {"yes_lower", gi.gadget.yes_lower},
                                           {"no_upper", gi.gadget.no_upper}};
        } else if (opt.kind == "case1-friendly") {
            inst = case1_friendly_instance(opt.case1, g.seed);
            meta["k"] = opt.case1.k;
            meta["epsilon"] = opt.case1.epsilon;
        } else {
            throw std::invalid_argument("unknown generator kind '" + opt.kind + "'");
        }
        require_valid(inst);
        detail::emit(g, out, detail::dump(instance_to_json(inst, meta)));
        return kOk;
    });
}

inline int cmd_solve(const SolveOptions& opt, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const InstanceFile f = detail::load_instance(opt.instance_path);
        const detail::Stopwatch clock(g.timing);
        const BribeSolution sol = detail::run_method(f.instance, opt.method, opt.epsilon, opt.theoretical, opt.max_items);
        SolutionFile s;
        s.chosen = sol.chosen;
        s.cost = sol.cost;
        s.win_prob = sol.win_prob;
        s.method = opt.method;
        if (opt.method == "approx") {
            ApproxConfig cfg;
            cfg.epsilon = opt.epsilon;
            s.epsilon = effective_epsilon(cfg);
        }
        s.truncated = sol.truncated;
        s.runtime_ms = clock.elapsed_ms();
        s.branch = sol.branch_tag;
        detail::emit(g, out, detail::dump(solution_to_json(s)));
        if (!g.quiet && s.truncated) err << "warning: search was truncated; the additive guarantee may not hold\n";
        return kOk;
    });
}

/// One line per check: "<name>: PASS|FAIL (<detail>)". Exit 4 when any
/// check fails.
inline int cmd_verify(const VerifyOptions& opt, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const InstanceFile f = detail::load_instance(opt.instance_path);
        const SolutionFile s = parse_solution(detail::read_file(opt.solution_path));
        const ElectionInstance& inst = f.instance;
        for (VoterId id : s.chosen) {
            if (id >= inst.num_voters()) {
                throw std::out_of_range("solution names voter " + std::to_string(id) + " but the instance has " +
                                        std::to_string(inst.num_voters()) + " voters");
            }
        }
        if (opt.samples < 1) throw std::invalid_argument("--samples must be >= 1");

        std::ostringstream report;
        bool all_ok = true;
        auto line = [&](const std::string& name, bool ok, const std::string& detail) {
            all_ok = all_ok && ok;
            report << name << ": " << (ok ? "PASS" : "FAIL") << " (" << detail << ")\n";
        };

        std::string why;
        try {
            check_bribe_set(inst, s.chosen);
        } catch (const std::exception& e) {
            why = e.what();
        }
        const bool sorted = std::is_sorted(s.chosen.begin(), s.chosen.end());
        if (why.empty() && !sorted) why = "chosen ids are not sorted";
        if (!why.empty()) {
            line("feasibility", false, why);
            detail::emit(g, out, report.str());
            return kVerifyFailed;
        }

        const double cost = bribe_cost(inst, s.chosen);
        line("feasibility", cost <= inst.budget() + kExactTolerance,
             "cost " + detail::format_double(cost) + " vs budget " + detail::format_double(inst.budget()));
        line("cost", std::abs(cost - s.cost) <= kExactTolerance,
             "recomputed " + detail::format_double(cost) + ", claimed " + detail::format_double(s.cost) +
                 ", tol 1e-9");

        const double exact = evaluate_win_prob(inst, s.chosen);
        line("win_prob_exact", std::abs(exact - s.win_prob) <= kExactTolerance,
             "recomputed " + detail::format_double(exact) + ", claimed " + detail::format_double(s.win_prob) +
                 ", tol 1e-9");

        const McEstimate mc = mc_estimate_win_prob(inst, s.chosen, opt.samples, g.seed);
        // A zero-width interval (estimate 0 or 1) still deserves a few samples of slack.
        const double tol = std::max(kMcHalfWidths * mc.half_width, 3.0 / static_cast<double>(opt.samples));
        line("win_prob_mc", std::abs(mc.estimate - exact) <= tol,
             "estimate " + detail::format_double(mc.estimate) + " over " + std::to_string(opt.samples) +
                 " samples, tol " + detail::format_double(tol));

        detail::emit(g, out, report.str());
        if (!g.quiet) err << (all_ok ? "verification passed\n" : "verification FAILED\n");
        return all_ok ? kOk : kVerifyFailed;
    });
}

inline int cmd_reduce(const ReduceOptions& opt, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const InstanceFile f = detail::load_instance(opt.instance_path);
        Json j;
        Json prov;
        prov["source"] = opt.instance_path;
        prov["target"] = opt.target;
        if (opt.target == "ku") {
            j = ku_to_json(bvu_to_ku(f.instance));
            prov["alpha"] = nullptr;
            prov["j0"] = nullptr;
        } else if (opt.target == "mku") {
            if (opt.j0 < 1) throw std::out_of_range("j0 is 1-based");
            j = mku_to_json(bvu_to_mku(f.instance, MkuGuess{opt.alpha, opt.j0 - 1}));
            prov["alpha"] = opt.alpha;
            prov["j0"] = opt.j0;
        } else {
            throw std::invalid_argument("unknown reduction target '" + opt.target + "' (expected ku or mku)");
        }
        j["provenance"] = std::move(prov);
        detail::emit(g, out, detail::dump(j));
        return kOk;
    });
}

inline constexpr const char* kBenchHeader = "instance,method,epsilon,value,exact_gap,runtime_ms,error";

/// One CSV row per (instance, method, epsilon); instances in sorted path
/// order. Failures become rows with the error column set.
inline int cmd_bench(const BenchOptions& opt, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        namespace fs = std::filesystem;
        if (!fs::is_directory(opt.dir)) throw io_error(opt.dir + " is not a directory");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(opt.dir)) {
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        }
        if (files.empty()) throw std::invalid_argument("no .json instances in " + opt.dir);
        std::sort(files.begin(), files.end());
        for (const auto& m : opt.methods) {
            if (m != "exact" && m != "approx") throw std::invalid_argument("unknown method '" + m + "'");
        }
        for (double e : opt.epsilons) {
            ApproxConfig cfg;
            cfg.epsilon = e;
            check_config(cfg);
        }

        std::ostringstream csv;
        csv << kBenchHeader << "\n";
        for (const auto& path : files) {
            const std::string name = path.filename().string();
            std::optional<InstanceFile> f;
            std::string load_error;
            try {
                f = detail::load_instance(path.string());
            } catch (const std::exception& e) {
                load_error = e.what();
            }

            std::optional<double> exact_value;
            std::optional<double> exact_ms;
            std::string exact_error;
            auto run_exact = [&] {
                if (exact_value || !exact_error.empty() || !f) return;
                try {
                    const detail::Stopwatch clock(g.timing);
                    exact_value = detail::run_method(f->instance, "exact", 0.0, false, opt.max_items).win_prob;
                    exact_ms = clock.elapsed_ms();
                } catch (const std::exception& e) {
                    exact_error = e.what();
                }
            };

            for (const auto& method : opt.methods) {
                const std::vector<double> eps_list = method == "approx" ? opt.epsilons : std::vector<double>{};
                const std::size_t rows = method == "approx" ? eps_list.size() : 1;
                for (std::size_t r = 0; r < rows; ++r) {
                    std::string eps_s, value_s, gap_s, ms_s, error_s;
                    if (method == "approx") eps_s = detail::format_double(eps_list[r]);
                    if (!f) {
                        error_s = load_error;
                    } else if (method == "exact") {
                        run_exact();
                        if (exact_value) {
                            value_s = detail::format_double(*exact_value);
                            gap_s = "0";
                            ms_s = detail::format_double(*exact_ms);
                        } else {
                            error_s = exact_error;
                        }
                    } else {
                        if (std::find(opt.methods.begin(), opt.methods.end(), "exact") != opt.methods.end()) {
                            run_exact();
                        }
                        try {
                            const detail::Stopwatch clock(g.timing);
                            const double v = detail::run_method(f->instance, "approx", eps_list[r], opt.theoretical,
                                                                opt.max_items)
                                                 .win_prob;
                            ms_s = detail::format_double(clock.elapsed_ms());
                            value_s = detail::format_double(v);
                            if (exact_value) gap_s = detail::format_double(*exact_value - v);
                        } catch (const std::exception& e) {
                            error_s = e.what();
                        }
                    }
                    csv << detail::csv_field(name) << "," << method << "," << eps_s << "," << value_s << ","
                        << gap_s << "," << ms_s << "," << detail::csv_field(error_s) << "\n";
                }
            }
            if (!g.quiet) err << "benchmarked " << name << "\n";
        }
        detail::emit(g, out, csv.str());
        return kOk;
    });
}

}  // namespace bvu::cli
