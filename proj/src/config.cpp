#include "penreg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "penreg/error.hpp"

namespace penreg {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = value.find(',');
        const std::string_view item = trim(value.substr(0, comma));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

double parse_double(std::string_view key, std::string_view text)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInput(fmt::format("{}: '{}' is not a number", key, text));
    }
    return value;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text)
{
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidInput(fmt::format("{}: '{}' is not an integer", key, text));
    }
    return value;
}

template <class T, class Fn>
std::vector<T> parse_list(std::string_view key, std::string_view value, Fn&& parse_one)
{
    std::vector<T> out;
    for (std::string_view item : split_list(value)) out.push_back(parse_one(item));
    if (out.empty()) throw InvalidInput(fmt::format("{}: empty list", key));
    return out;
}

template <class T, class Fn>
std::string join(const std::vector<T>& items, Fn&& show)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += show(items[i]);
    }
    return out;
}

}  // namespace

std::string exact_number(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::string format_number(double value)
{
    return fmt::format("{:.6g}", value);
}

std::vector<Scenario> RunConfig::scenarios() const
{
    std::vector<Scenario> out;
    for (PenaltyMode penalty : penalties) {
        for (Index n : n_values) {
            for (double c : c_values) {
                Scenario s;
                s.design = design;
                s.n = n;
                s.c = c;
                s.sigma2 = sigma2;
                s.rho = rho;
                s.penalty = penalty;
                s.selectors = selectors;
                s.reps = reps;
                s.base_seed = seed;
                s.design_seed = design_seed;
                s.grid_size = grid_size;
                s.cv_folds = cv_folds;
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value)
{
    value = trim(value);
    if (key == "command") {
        if (value != "simulate" && value != "fit" && value != "report") {
            throw InvalidInput(fmt::format("command: '{}' is not simulate, fit or report", value));
        }
        config.command = std::string(value);
    } else if (key == "design") {
        config.design = parse_design(value);
    } else if (key == "n") {
        config.n_values = parse_list<Index>(key, value, [&](auto v) { return parse_int<Index>(key, v); });
    } else if (key == "c") {
        config.c_values = parse_list<double>(key, value, [&](auto v) { return parse_double(key, v); });
    } else if (key == "sigma2") {
        config.sigma2 = parse_double(key, value);
    } else if (key == "rho") {
        config.rho = parse_double(key, value);
    } else if (key == "penalty") {
        config.penalties = parse_list<PenaltyMode>(key, value, [](auto v) { return parse_penalty_mode(v); });
    } else if (key == "selectors") {
        config.selectors = parse_list<SelectorId>(key, value, [](auto v) { return parse_selector(v); });
    } else if (key == "reps") {
        config.reps = parse_int<int>(key, value);
    } else if (key == "seed") {
        config.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "design_seed") {
        config.design_seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "grid_size") {
        config.grid_size = parse_int<int>(key, value);
    } else if (key == "cv_folds") {
        config.cv_folds = parse_int<int>(key, value);
    } else if (key == "data") {
        config.data_path = std::string(value);
    } else if (key == "target") {
        config.target = std::string(value);
    } else if (key == "records") {
        config.records_path = std::string(value);
    } else if (key == "out") {
        config.output_dir = std::string(value);
    } else if (key == "workers") {
        config.workers = parse_int<int>(key, value);
        if (config.workers < 1) throw InvalidInput("workers must be at least 1");
    } else {
        throw InvalidInput(fmt::format("unknown config key '{}'", key));
    }
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidInput(fmt::format("config line {}: expected key = value", line_no));
        }
        const std::string_view key = trim(line.substr(0, eq));
        if (key.starts_with("info.")) continue;
        try {
            apply_setting(base, key, line.substr(eq + 1));
        } catch (const InvalidInput& e) {
            throw InvalidInput(fmt::format("config line {}: {}", line_no, e.what()));
        }
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot open config file '{}'", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(base));
}

std::string serialize_config(const RunConfig& c)
{
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
    line("command", c.command);
    line("design", std::string(design_name(c.design)));
    line("n", join(c.n_values, [](Index v) { return std::to_string(v); }));
    line("c", join(c.c_values, [](double v) { return exact_number(v); }));
    line("sigma2", exact_number(c.sigma2));
    line("rho", exact_number(c.rho));
    line("penalty", join(c.penalties, [](PenaltyMode m) { return std::string(penalty_mode_name(m)); }));
    line("selectors", join(c.selectors, [](SelectorId s) { return std::string(selector_name(s)); }));
    line("reps", std::to_string(c.reps));
    line("seed", std::to_string(c.seed));
    line("design_seed", std::to_string(c.design_seed));
    line("grid_size", std::to_string(c.grid_size));
    line("cv_folds", std::to_string(c.cv_folds));
    line("data", c.data_path);
    line("target", c.target);
    line("records", c.records_path);
    line("out", c.output_dir);
    line("workers", std::to_string(c.workers));
    return out;
}

}  // namespace penreg
