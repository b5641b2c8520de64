#include "cli.hpp"

#include "ballistic/bcov.hpp"
#include "ballistic/metrics.hpp"
#include "ballistic/permutation.hpp"
#include "ballistic/simulate.hpp"
#include "ballistic/types.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace ballistic::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line, char delimiter) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delimiter, start);
        cells.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

std::optional<double> parse_double(std::string_view cell) {
    double v = 0.0;
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

}  // namespace

char detect_delimiter(std::string_view line) {
    constexpr std::array<char, 3> candidates{',', '\t', ';'};
    char best = ',';
    std::ptrdiff_t best_count = 0;
    for (char c : candidates) {
        const auto count = std::count(line.begin(), line.end(), c);
        if (count > best_count) {
            best = c;
            best_count = count;
        }
    }
    return best;
}

CsvTable parse_csv(std::istream& in, std::optional<char> delimiter, bool header) {
    CsvTable table;
    std::string line;
    std::size_t line_number = 0;
    std::size_t width = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        if (!delimiter) delimiter = detect_delimiter(line);
        auto cells = split(line, *delimiter);
        if (first) {
            width = cells.size();
            first = false;
            if (header) {
                table.header = std::move(cells);
                continue;
            }
        } else if (cells.size() != width) {
            throw Failure(kMalformedInput, "line " + std::to_string(line_number) + " has " +
                                               std::to_string(cells.size()) + " cells, expected " +
                                               std::to_string(width));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

CsvTable read_csv(const std::string& path, std::optional<char> delimiter, bool header) {
    std::ifstream in(path);
    if (!in) throw Failure(kMalformedInput, "cannot open '" + path + "'");
    return parse_csv(in, delimiter, header);
}

std::vector<std::vector<double>> numeric_rows(const CsvTable& table, const std::vector<std::size_t>& skip_columns) {
    std::vector<std::vector<double>> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<double> row;
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            if (std::find(skip_columns.begin(), skip_columns.end(), c) != skip_columns.end()) continue;
            const auto v = parse_double(table.rows[r][c]);
            if (!v) {
                throw Failure(kMalformedInput, "non-numeric cell '" + table.rows[r][c] + "' at row " +
                                                   std::to_string(r + 1) + ", column " + std::to_string(c + 1));
            }
            row.push_back(*v);
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::string format_number(double value) {
    std::ostringstream os;
    os << std::setprecision(8) << value;
    std::string s = os.str();
    if (std::isfinite(value) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

namespace {

using Json = nlohmann::ordered_json;

struct CommonOptions {
    bool distance = false;
    std::string metric = "euclidean";
    std::size_t permutations = kDefaultPermutations;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    bool json = false;
    bool header = false;
    std::string delimiter;
};

std::optional<char> delimiter_of(const CommonOptions& o) {
    if (o.delimiter.empty()) return std::nullopt;
    if (o.delimiter == "tab" || o.delimiter == "\\t") return '\t';
    if (o.delimiter.size() != 1) throw Failure(kArgumentConflict, "delimiter must be one character");
    return o.delimiter.front();
}

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_flag("--distance", o.distance, "Treat each input as a precomputed distance matrix");
    cmd.add_option("--metric", o.metric, "Geometry for raw coordinates")
        ->check(CLI::IsMember({"euclidean", "geodesic"}));
    cmd.add_option("--permutations", o.permutations, "Permutation replicates (0 = statistic only)");
    cmd.add_option("--seed", o.seed, "Random seed");
    cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd.add_flag("--json", o.json, "Print a machine-readable document instead of the report");
    cmd.add_flag("--header", o.header, "First input line holds column names");
    cmd.add_option("--delimiter", o.delimiter, "Cell delimiter (default: auto-detect comma/tab/semicolon)");
}

DistanceMatrix distances_from(const std::vector<std::vector<double>>& rows, const CommonOptions& o) {
    if (o.distance) return DistanceMatrix::validate(rows);
    const PointSet points = PointSet::from_rows(rows);
    return o.metric == "geodesic" ? great_circle_distances(points) : euclidean_distances(points);
}

Json result_json(const TestResult& r, const std::string& method) {
    Json doc;
    doc["statistic"] = r.statistic;
    doc["p_value"] = r.p_value ? Json(*r.p_value) : Json(nullptr);
    doc["replicates"] = r.replicates;
    doc["sizes"] = r.sizes;
    doc["method"] = method;
    doc["variant"] = r.variant;
    Json info = Json::array();
    for (const auto& v : r.complete_info) {
        Json item;
        item["name"] = v.name;
        item["statistic"] = v.statistic;
        item["p_value"] = v.p_value ? Json(*v.p_value) : Json(nullptr);
        info.push_back(std::move(item));
    }
    doc["complete_info"] = std::move(info);
    return doc;
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
    std::string s;
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? " " : "") + std::to_string(sizes[i]);
    return s;
}

std::string statistic_line(const std::string& name, const TestResult& r) {
    std::string line = name + " = " + format_number(r.statistic);
    if (r.p_value) line += ", p-value = " + format_number(*r.p_value);
    return line;
}

struct BdOptions {
    CommonOptions common;
    std::string input;
    std::string labels_col;
    std::vector<std::size_t> sizes;
    std::string kbd_type = "sum";
};

int run_bd(const BdOptions& o, std::ostream& out) {
    const bool labelled = !o.labels_col.empty();
    if (labelled == !o.sizes.empty()) {
        throw Failure(kArgumentConflict, "give exactly one of --sizes or --labels-col");
    }
    const BdKind kind = parse_bd_kind(o.kbd_type);
    const CsvTable table = read_csv(o.input, delimiter_of(o.common), o.common.header || labelled);

    std::vector<std::size_t> skip;
    GroupedSample groups;
    if (labelled) {
        const auto it = std::find(table.header.begin(), table.header.end(), o.labels_col);
        if (it == table.header.end()) {
            throw Failure(kMalformedInput, "no column named '" + o.labels_col + "'");
        }
        const std::size_t column = static_cast<std::size_t>(it - table.header.begin());
        skip.push_back(column);
        // Groups follow the sorted distinct label values, not their order of appearance.
        std::map<std::string, std::size_t> ids;
        for (const auto& row : table.rows) ids.emplace(row[column], 0);
        std::size_t next = 0;
        for (auto& [name, id] : ids) id = next++;
        std::vector<std::size_t> labels;
        for (const auto& row : table.rows) labels.push_back(ids.at(row[column]));
        groups = GroupedSample::from_labels(std::move(labels));
    } else {
        std::size_t total = 0;
        for (std::size_t s : o.sizes) total += s;
        if (total != table.rows.size()) {
            throw Failure(kValidationFailure, "sizes sum to " + std::to_string(total) + " but the input has " +
                                                  std::to_string(table.rows.size()) + " rows");
        }
        groups = GroupedSample::from_sizes(o.sizes);
    }
    if (groups.groups() < 2) throw Failure(kValidationFailure, "need at least two groups");

    const auto rows = numeric_rows(table, skip);
    const PermutationPlan plan = PermutationPlan::shuffle_labels(rows.size(), o.common.permutations, o.common.seed);
    TestResult result;
    const bool univariate = !o.common.distance && o.common.metric == "euclidean" && !rows.empty() &&
                            rows.front().size() == 1;
    if (univariate) {
        std::vector<double> x;
        for (const auto& row : rows) x.push_back(row.front());
        result = bd_permutation_test_univariate(x, groups, plan, kind, o.common.threads);
    } else {
        result = bd_permutation_test(distances_from(rows, o.common), groups, plan, kind, o.common.threads);
    }

    const std::size_t k = groups.groups();
    const std::string method = std::to_string(k) + "-sample Ball Divergence Test";
    if (o.common.json) {
        out << result_json(result, method).dump(2) << '\n';
        return kOk;
    }
    out << "    " << method << "\n\n";
    out << "data:  " << o.input << "\n";
    out << "number of observations = " << rows.size() << ", group sizes: " << join_sizes(result.sizes) << "\n";
    out << "replicates = " << result.replicates;
    if (k > 2) out << ", kbd.type: " << result.variant;
    out << "\n";
    out << statistic_line(k > 2 ? "bd." + result.variant : "bd", result) << "\n";
    out << "alternative hypothesis: distributions of samples are distinct\n";
    return kOk;
}

struct BcovOptions {
    CommonOptions common;
    std::vector<std::string> inputs;
    std::string weight = "constant";
    bool bcor = false;
};

int run_bcov(const BcovOptions& o, std::ostream& out) {
    if (o.inputs.size() < 2) throw Failure(kArgumentConflict, "need at least two --input files");
    const WeightKind weight = parse_weight_kind(o.weight);
    std::vector<DistanceMatrix> dists;
    std::size_t n = 0;
    for (std::size_t v = 0; v < o.inputs.size(); ++v) {
        const auto rows = numeric_rows(read_csv(o.inputs[v], delimiter_of(o.common), o.common.header));
        if (v == 0) {
            n = rows.size();
        } else if (rows.size() != n) {
            throw Failure(kSampleSizeMismatch, "'" + o.inputs[v] + "' has " + std::to_string(rows.size()) +
                                                   " observations, expected " + std::to_string(n));
        }
        dists.push_back(distances_from(rows, o.common));
    }
    const PermutationPlan plan =
        PermutationPlan::shuffle_margins(n, dists.size(), o.common.permutations, o.common.seed);
    const TestResult result = bcov_permutation_test(dists, plan, weight, o.common.threads);
    std::optional<BcovTriple> bcor;
    if (o.bcor) bcor = bcor_all(dists);

    const std::string method = dists.size() == 2 ? "Ball Covariance test of independence"
                                                 : "Ball Covariance test of mutual independence";
    if (o.common.json) {
        Json doc = result_json(result, method);
        if (bcor) {
            Json b;
            for (WeightKind w : {WeightKind::Constant, WeightKind::Probability, WeightKind::ChiSquare}) {
                b[std::string(to_string(w))] = bcor->select(w);
            }
            doc["bcor"] = std::move(b);
        }
        out << doc.dump(2) << '\n';
        return kOk;
    }
    std::string data;
    for (std::size_t v = 0; v < o.inputs.size(); ++v) data += (v ? ", " : "") + o.inputs[v];
    out << "    " << method << "\n\n";
    out << "data:  " << data << "\n";
    out << "number of observations = " << n << "\n";
    out << "replicates = " << result.replicates << ", weight: " << result.variant << "\n";
    out << statistic_line("bcov." + result.variant, result) << "\n";
    if (bcor) {
        const double value = bcor->select(weight);
        out << "bcor." << result.variant << " = " << format_number(value)
            << ", sqrt = " << format_number(std::sqrt(value)) << "\n";
    }
    out << "alternative hypothesis: random variables are dependent\n";
    return kOk;
}

struct SimulateOptions {
    std::string scenario;
    std::vector<std::size_t> n{30};
    std::size_t reps = 500;
    std::size_t permutations = 199;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    double shift = 1.0;
};

int run_simulate(const SimulateOptions& o, std::ostream& out) {
    SimulationConfig config;
    try {
        config.scenario = parse_scenario(o.scenario);
    } catch (const Error& e) {
        throw Failure(kArgumentConflict, e.what());
    }
    config.replications = o.reps;
    config.permutations = o.permutations;
    config.seed = o.seed;
    config.threads = o.threads;
    config.shift = o.shift;
    out << "scenario,n,statistic,replications,permutations,rejections,rate\n";
    for (std::size_t n : o.n) {
        config.n = n;
        for (const auto& r : rejection_rates(config)) {
            out << o.scenario << ',' << n << ',' << r.statistic << ',' << r.replications << ',' << o.permutations
                << ',' << r.rejections << ',' << format_number(r.rate()) << '\n';
        }
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ball Divergence and Ball Covariance permutation tests", "ballistic"};
    app.require_subcommand(1);

    BdOptions bd;
    CLI::App* bd_cmd = app.add_subcommand("bd", "K-sample test of equal distributions");
    bd_cmd->add_option("--input", bd.input, "Pooled sample (rows = observations)")->required();
    auto* labels_opt = bd_cmd->add_option("--labels-col", bd.labels_col, "Column holding group labels");
    auto* sizes_opt = bd_cmd->add_option("--sizes", bd.sizes, "Group sizes in row order")->delimiter(',');
    labels_opt->excludes(sizes_opt);
    bd_cmd->add_option("--kbd-type", bd.kbd_type, "sum, summax or max (unambiguous prefix)");
    add_common(*bd_cmd, bd.common);

    BcovOptions bcov;
    CLI::App* bcov_cmd = app.add_subcommand("bcov", "Test of (mutual) independence");
    bcov_cmd->add_option("--input", bcov.inputs, "One file per variable (rows = observations)")->required();
    bcov_cmd->add_option("--weight", bcov.weight, "constant, probability or chisquare (unambiguous prefix)");
    bcov_cmd->add_flag("--bcor", bcov.bcor, "Also report Ball Correlation");
    add_common(*bcov_cmd, bcov.common);

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Rejection rates of built-in scenarios");
    sim_cmd->add_option("--scenario", sim.scenario, "null-univariate, shift-univariate, null-pair, xor-mutual, circle-mixture")
        ->required();
    sim_cmd->add_option("--n", sim.n, "Comma-separated sample sizes")->delimiter(',');
    sim_cmd->add_option("--reps", sim.reps, "Replications per sample size");
    sim_cmd->add_option("--permutations", sim.permutations, "Permutation replicates per test");
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
    sim_cmd->add_option("--shift", sim.shift, "Location shift for shift-univariate");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kArgumentConflict;
    }

    try {
        if (*bd_cmd) return run_bd(bd, out);
        if (*bcov_cmd) return run_bcov(bcov, out);
        return run_simulate(sim, out);
    } catch (const Failure& e) {
        err << "error: " << e.what() << '\n';
        return e.code();
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.kind() == ErrorKind::InvalidArgument ? kArgumentConflict : kValidationFailure;
    }
}

}  // namespace ballistic::cli
