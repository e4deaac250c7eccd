// Command-line surface: counting engines, the census, the leading constant,
// and the error-term experiments, with CSV/JSON emission.
//
// Exit codes: 0 success, 2 usage error, 3 data error (malformed or
// mismatching reference data), 4 internal invariant violation (such as a
// counting-engine mismatch).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <d4census/census.hpp>

using namespace d4census;
using ordered_json = nlohmann::ordered_json;

namespace {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON number when exactly representable in 53 bits, decimal string beyond.
ordered_json json_int(const Int& v) {
    if (abs(v) < (Int(1) << 53)) return v.convert_to<std::int64_t>();
    return v.str();
}

std::string real_str(const Real& x, int digits) { return x.str(digits); }

// ---------------------------------------------------------------------------
// grid spec: "START:STOP:logK", e.g. "1e2:1e5:log10"
std::vector<Int> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3 || parts[2].rfind("log", 0) != 0)
        throw std::invalid_argument("grid spec must be START:STOP:logK");
    double start, stop;
    long base;
    try {
        start = std::stod(parts[0]);
        stop = std::stod(parts[1]);
        base = std::stol(parts[2].substr(3));
    } catch (const std::exception&) {
        throw std::invalid_argument("grid spec must be START:STOP:logK");
    }
    if (start < 1 || stop < start || base < 2)
        throw std::invalid_argument("grid spec requires 1 <= START <= STOP and K >= 2");
    std::vector<Int> out;
    for (double y = start; y <= stop * (1 + 1e-12); y *= base)
        out.push_back(Int(static_cast<std::int64_t>(std::llround(y))));
    return out;
}

// ---------------------------------------------------------------------------
// L-value cache backed by $D4CENSUS_CACHE_DIR/lvalues.json
class FileCache {
  public:
    FileCache() {
        const char* dir = std::getenv("D4CENSUS_CACHE_DIR");
        if (!dir || !*dir) return;
        path_ = std::string(dir) + "/lvalues.json";
        std::ifstream in(path_);
        if (in) {
            try {
                auto j = nlohmann::json::parse(in);
                for (auto& [k, v] : j.items()) table_[k] = v.get<std::string>();
            } catch (const std::exception&) {
                throw DataError("cache file is not valid JSON: " + path_);
            }
        }
        cache_.get = [this](const std::string& key) -> std::optional<std::string> {
            auto it = table_.find(key);
            if (it == table_.end()) return std::nullopt;
            return it->second;
        };
        cache_.put = [this](const std::string& key, const std::string& value) {
            table_[key] = value;
            dirty_ = true;
        };
    }
    ~FileCache() {
        if (path_.empty() || !dirty_) return;
        nlohmann::json j(table_);
        std::ofstream out(path_);
        out << j.dump(1) << "\n";
    }
    const LValueCache* get() const { return path_.empty() ? nullptr : &cache_; }

  private:
    std::string path_;
    std::map<std::string, std::string> table_;
    LValueCache cache_;
    bool dirty_ = false;
};

// ---------------------------------------------------------------------------
// reference tables: CSV with header abs_disc,galois_type,count
struct ReferenceRow {
    Int abs_disc;
    GaloisType type;
    Int count;
};

GaloisType parse_type(const std::string& s) {
    if (s == "D4") return GaloisType::D4;
    if (s == "C4") return GaloisType::C4;
    if (s == "V4") return GaloisType::V4;
    throw std::invalid_argument("unknown galois_type: " + s);
}

const char* type_name(GaloisType t) {
    switch (t) {
        case GaloisType::D4: return "D4";
        case GaloisType::C4: return "C4";
        default: return "V4";
    }
}

std::vector<ReferenceRow> load_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open reference file: " + path);
    std::string line;
    long lineno = 0;
    auto fail = [&](const std::string& why) {
        throw DataError(path + ": line " + std::to_string(lineno) + ": " + why);
    };
    if (!std::getline(in, line)) { lineno = 1; fail("empty file"); }
    lineno = 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "abs_disc,galois_type,count")
        fail("header must be exactly \"abs_disc,galois_type,count\"");
    std::vector<ReferenceRow> rows;
    std::set<std::pair<Int, int>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string a, t, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, t, ',') || !std::getline(ls, c))
            fail("expected three comma-separated fields");
        ReferenceRow row;
        try {
            row.abs_disc = Int(a);
            row.count = Int(c);
            row.type = parse_type(t);
        } catch (const std::exception& e) {
            fail(e.what());
        }
        if (row.abs_disc < 1) fail("abs_disc must be positive");
        if (row.count < 0) fail("count must be nonnegative");
        if (!rows.empty() && row.abs_disc < rows.back().abs_disc)
            fail("rows must be sorted by abs_disc");
        if (!seen.insert({row.abs_disc, static_cast<int>(row.type)}).second)
            fail("duplicate (abs_disc, galois_type) row");
        rows.push_back(row);
    }
    return rows;
}

// Exact per-(abs_disc, type) quartic-field counts up to X, deduplicated by
// the multiplicity of each bucket (D4 twice, C4 once, V4 thrice).
std::map<std::pair<Int, int>, Int> quartic_table(const Int& X, unsigned threads) {
    std::vector<Int> deltas;
    if (X >= 9)
        for (auto& d : fundamental_discriminants(isqrt(X)))
            if (d * d <= X) deltas.push_back(d);
    std::vector<std::map<std::pair<Int, int>, Int>> partial(deltas.size());
    detail::parallel_for(deltas.size(), threads, [&](std::size_t i) {
        QuadField k(deltas[i]);
        Parametrization ctx(k);
        Int Y = X / (deltas[i] * deltas[i]);
        if (Y < 1) return;
        auto rc = count_relative_direct(ctx, Y.convert_to<double>(), true);
        for (auto& d : rc.descriptors)
            partial[i][{d.abs_disc, static_cast<int>(d.galois_type)}] += 1;
    });
    std::map<std::pair<Int, int>, Int> raw;
    for (auto& p : partial)
        for (auto& [key, v] : p) raw[key] += v;
    std::map<std::pair<Int, int>, Int> out;
    for (auto& [key, v] : raw) {
        Int m = key.second == static_cast<int>(GaloisType::D4)   ? 2
                : key.second == static_cast<int>(GaloisType::V4) ? 3
                                                                 : 1;
        if (v % m != 0)
            throw std::logic_error("census: multiplicity violated at abs_disc " +
                                   key.first.str());
        out[key] = v / m;
    }
    return out;
}

// ---------------------------------------------------------------------------
int cmd_count_relative(std::int64_t disc, std::int64_t bound,
                       const std::string& engine, const std::string& format,
                       unsigned /*threads*/) {
    if (!is_fundamental_discriminant(Int(disc))) {
        std::cerr << "error: not a fundamental discriminant: " << disc << "\n";
        return 2;
    }
    if (bound < 1) {
        std::cerr << "error: --bound must be >= 1\n";
        return 2;
    }
    QuadField k{Int(disc)};
    std::optional<RelativeCountResult> direct;
    std::optional<Int> characters;
    if (engine == "direct" || engine == "both") {
        Parametrization ctx(k);
        direct = count_relative_direct(ctx, double(bound), false);
    }
    if (engine == "characters" || engine == "both")
        characters = count_relative_characters(k, double(bound));

    std::string verdict;
    if (direct && characters)
        verdict = direct->total == *characters ? "match" : "mismatch";

    if (format == "csv") {
        std::cout << "engine,total,n_d4,n_c4,n_v4\n";
        if (direct)
            std::cout << "direct," << direct->total << ","
                      << direct->by_type.at(GaloisType::D4) << ","
                      << direct->by_type.at(GaloisType::C4) << ","
                      << direct->by_type.at(GaloisType::V4) << "\n";
        if (characters) std::cout << "characters," << *characters << ",,,\n";
        if (!verdict.empty()) std::cout << "verdict," << verdict << ",,,\n";
    } else {
        ordered_json j;
        j["disc"] = disc;
        j["bound"] = bound;
        if (direct) {
            ordered_json d;
            d["total"] = json_int(direct->total);
            d["n_d4"] = json_int(direct->by_type.at(GaloisType::D4));
            d["n_c4"] = json_int(direct->by_type.at(GaloisType::C4));
            d["n_v4"] = json_int(direct->by_type.at(GaloisType::V4));
            j["direct"] = d;
        }
        if (characters) j["characters"] = {{"total", json_int(*characters)}};
        if (!verdict.empty()) j["verdict"] = verdict;
        std::cout << j.dump(2) << "\n";
    }
    if (verdict == "mismatch") {
        std::cerr << "error: counting engines disagree\n";
        return 4;
    }
    return 0;
}

int cmd_census(std::int64_t bound, bool breakdown, const std::string& compare,
               const std::string& format, unsigned threads) {
    Int X(bound);
    auto r = quad_over_quad_total(X, threads, true);
    const char* id = r.identity_holds() ? "ok" : "fail";

    if (format == "csv") {
        std::cout << "X,total,n_d4,n_c4,n_v4,identity_check\n";
        std::cout << r.X << "," << r.total_quad_over_quad << "," << r.n_d4 << ","
                  << r.n_c4 << "," << r.n_v4 << "," << id << "\n";
        if (breakdown) {
            std::cout << "\ndelta,relative_bound,total,raw_d4,raw_c4,raw_v4\n";
            for (auto& f : r.per_field)
                std::cout << f.delta << "," << f.relative_bound << "," << f.total
                          << "," << f.raw_d4 << "," << f.raw_c4 << "," << f.raw_v4
                          << "\n";
        }
    } else {
        ordered_json j;
        j["X"] = json_int(r.X);
        j["total"] = json_int(r.total_quad_over_quad);
        j["n_d4"] = json_int(r.n_d4);
        j["n_c4"] = json_int(r.n_c4);
        j["n_v4"] = json_int(r.n_v4);
        j["identity_check"] = id;
        if (breakdown) {
            ordered_json arr = ordered_json::array();
            for (auto& f : r.per_field) {
                ordered_json o;
                o["delta"] = json_int(f.delta);
                o["relative_bound"] = json_int(f.relative_bound);
                o["total"] = json_int(f.total);
                o["raw_d4"] = json_int(f.raw_d4);
                o["raw_c4"] = json_int(f.raw_c4);
                o["raw_v4"] = json_int(f.raw_v4);
                arr.push_back(o);
            }
            j["per_field"] = arr;
        }
        std::cout << j.dump(2) << "\n";
    }

    if (!compare.empty()) {
        auto ref = load_reference(compare);
        auto table = quartic_table(X, threads);
        long mismatches = 0;
        for (auto& row : ref) {
            if (row.abs_disc > X) continue;
            auto it = table.find({row.abs_disc, static_cast<int>(row.type)});
            Int got = it == table.end() ? Int(0) : it->second;
            if (got != row.count) {
                ++mismatches;
                std::cerr << "diff: abs_disc " << row.abs_disc << " "
                          << type_name(row.type) << ": reference " << row.count
                          << ", computed " << got << "\n";
            }
        }
        if (mismatches) {
            std::cerr << "error: " << mismatches << " reference row(s) disagree\n";
            return 3;
        }
        std::cerr << "reference comparison: all rows agree\n";
    }
    return 0;
}

int cmd_constant_c(std::int64_t truncation, int precision) {
    FileCache cache;
    auto r = constant_C(static_cast<long>(truncation), cache.get());
    ordered_json j;
    j["truncation"] = truncation;
    j["partial_sum"] = real_str(r.partial_sum, precision);
    j["tail_bound"] = real_str(r.tail_bound, precision);
    j["lo"] = real_str(r.lo, precision);
    j["hi"] = real_str(r.hi, precision);
    j["precision_digits"] = precision;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_error_scan(std::int64_t disc, const std::string& grid_spec, int precision) {
    if (!is_fundamental_discriminant(Int(disc))) {
        std::cerr << "error: not a fundamental discriminant: " << disc << "\n";
        return 2;
    }
    auto grid = parse_grid(grid_spec);
    QuadField k{Int(disc)};
    auto scan = error_scan(k, grid);
    ordered_json j;
    j["disc"] = disc;
    ordered_json rows = ordered_json::array();
    for (auto& p : scan.grid) {
        ordered_json o;
        o["Y"] = json_int(p.Y);
        o["count"] = json_int(p.count);
        o["main_term"] = real_str(p.main_term, precision);
        o["error"] = real_str(p.error, precision);
        o["ratio"] = real_str(p.ratio, precision);
        rows.push_back(o);
    }
    j["grid"] = rows;
    j["sup_ratio"] = real_str(scan.sup_ratio, precision);
    j["precision_digits"] = precision;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_zsplit(std::int64_t bound, int precision, unsigned threads) {
    auto rep = z_split_experiment(Int(bound), threads);
    ordered_json j;
    j["X"] = bound;
    ordered_json rows = ordered_json::array();
    for (auto& r : rep.rows) {
        ordered_json o;
        o["Z"] = real_str(r.Z, precision);
        o["head"] = real_str(r.head, precision);
        o["tail"] = real_str(r.tail, precision);
        o["total"] = real_str(r.total, precision);
        rows.push_back(o);
    }
    j["rows"] = rows;
    j["best_index"] = rep.best_index;
    j["far_tail_bound"] = real_str(rep.far_tail_bound, precision);
    j["far_tail_shape"] = real_str(rep.far_tail_shape, precision);
    j["precision_digits"] = precision;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_fit_secondary(const std::string& grid_spec, unsigned threads) {
    auto grid = parse_grid(grid_spec);
    auto fit = secondary_fit(grid, threads);
    ordered_json j;
    ordered_json g = ordered_json::array(), c = ordered_json::array();
    for (auto& x : fit.grid) g.push_back(json_int(x));
    for (auto& n : fit.counts) c.push_back(json_int(n));
    j["grid"] = g;
    j["counts"] = c;
    j["fitted_D"] = fit.fitted_D;
    j["residuals"] = fit.residuals;
    j["relative_residuals"] = fit.relative_residuals;
    j["precision_digits"] = 15;  // double-precision fit
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quartic field census by Galois closure over quadratic bases"};
    app.require_subcommand(1);

    unsigned threads = 1;
    int precision = 30;
    app.add_option("--threads", threads, "worker thread count")
        ->check(CLI::PositiveNumber);
    app.add_option("--precision", precision, "printed digits for interval values")
        ->check(CLI::Range(30, 75));

    std::int64_t cr_disc = 0, cr_bound = 0;
    std::string cr_engine = "both", cr_format = "csv";
    auto* cr = app.add_subcommand("count-relative",
                                  "count quadratic extensions of one base field");
    cr->add_option("--disc", cr_disc, "base field discriminant")->required();
    cr->add_option("--bound", cr_bound, "bound on the relative discriminant norm")
        ->required();
    cr->add_option("--engine", cr_engine, "direct, characters, or both")
        ->check(CLI::IsMember({"direct", "characters", "both"}));
    cr->add_option("--format", cr_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::int64_t cs_bound = 0;
    bool cs_breakdown = false;
    std::string cs_compare, cs_format = "csv";
    auto* cs = app.add_subcommand("census", "full census up to a discriminant bound");
    cs->add_option("--bound", cs_bound, "bound on |disc| of the quartic fields")
        ->required()
        ->check(CLI::PositiveNumber);
    cs->add_flag("--breakdown", cs_breakdown, "emit the per-base-field table");
    cs->add_option("--compare", cs_compare, "reference CSV to diff against");
    cs->add_option("--format", cs_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    std::int64_t cc_trunc = 0;
    auto* cc = app.add_subcommand("constant-c", "leading constant with certified tail");
    cc->add_option("--truncation", cc_trunc, "discriminant truncation bound")
        ->required()
        ->check(CLI::PositiveNumber);

    std::int64_t es_disc = 0;
    std::string es_grid;
    auto* es = app.add_subcommand("error-scan", "exact error terms along a grid");
    es->add_option("--disc", es_disc, "base field discriminant")->required();
    es->add_option("--grid", es_grid, "grid spec START:STOP:logK")->required();

    std::int64_t zs_bound = 0;
    auto* zs = app.add_subcommand("zsplit", "error-split experiment at three cutoffs");
    zs->add_option("--bound", zs_bound, "census bound X")->required();

    std::string fs_grid;
    auto* fs = app.add_subcommand("fit-secondary",
                                  "fit the V4 count to D sqrt(X) (log X)^2");
    fs->add_option("--grid", fs_grid, "grid spec START:STOP:logK")->required();

    // global flags remain usable after a subcommand name
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cr->parsed())
            return cmd_count_relative(cr_disc, cr_bound, cr_engine, cr_format, threads);
        if (cs->parsed())
            return cmd_census(cs_bound, cs_breakdown, cs_compare, cs_format, threads);
        if (cc->parsed()) return cmd_constant_c(cc_trunc, precision);
        if (es->parsed()) return cmd_error_scan(es_disc, es_grid, precision);
        if (zs->parsed()) return cmd_zsplit(zs_bound, precision, threads);
        if (fs->parsed()) return cmd_fit_secondary(fs_grid, threads);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
