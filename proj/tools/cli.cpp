#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "rydmagic/parallel.hpp"

namespace rydmagic::cli {

uint64_t fnv1a64(const std::string& text)
{
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
std::string shortest(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool parse_plain(const std::string& s, double& out)
{
    if (s.empty())
        return false;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc() && res.ptr == end;
}

// Accepts plain numbers and multiples of pi: "pi", "-pi/2", "0.5*pi", "3*pi/4".
bool parse_real(std::string s, double& out)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto p = s.find("pi");
    if (p == std::string::npos)
        return parse_plain(s, out);
    std::string head = s.substr(0, p), tail = s.substr(p + 2);
    double factor = 1, divisor = 1;
    if (head == "-")
        factor = -1;
    else if (!head.empty()) {
        if (head.back() != '*' || !parse_plain(head.substr(0, head.size() - 1), factor))
            return false;
    }
    if (!tail.empty()) {
        if (tail.front() != '/' || !parse_plain(tail.substr(1), divisor) || divisor == 0)
            return false;
    }
    out = factor * M_PI / divisor;
    return true;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin)
{
    Config c;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig(origin + ":" + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty())
            throw InvalidConfig(origin + ":" + std::to_string(number) + ": empty key");
        if (c.has(key))
            throw InvalidConfig(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
        c.values_[key] = value;
    }
    return c;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidConfig("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Config::raw(const std::string& key) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? std::string{} : it->second;
}

double Config::real(const std::string& key, double fallback)
{
    consumed_.insert(key);
    double v = fallback;
    if (has(key) && !parse_real(raw(key), v))
        throw InvalidConfig("key '" + key + "': not a number: " + raw(key));
    if (!std::isfinite(v))
        throw InvalidConfig("key '" + key + "': must be finite");
    effective_[key] = shortest(v);
    return v;
}

long Config::integer(const std::string& key, long fallback)
{
    consumed_.insert(key);
    long v = fallback;
    if (has(key)) {
        const std::string s = raw(key);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw InvalidConfig("key '" + key + "': not an integer: " + s);
    }
    effective_[key] = std::to_string(v);
    return v;
}

bool Config::flag(const std::string& key, bool fallback)
{
    consumed_.insert(key);
    bool v = fallback;
    if (has(key)) {
        const std::string s = raw(key);
        if (s == "true" || s == "1" || s == "yes")
            v = true;
        else if (s == "false" || s == "0" || s == "no")
            v = false;
        else
            throw InvalidConfig("key '" + key + "': expected true or false, got " + s);
    }
    effective_[key] = v ? "true" : "false";
    return v;
}

std::string Config::text(const std::string& key, const std::string& fallback)
{
    consumed_.insert(key);
    const std::string v = has(key) ? raw(key) : fallback;
    effective_[key] = v;
    return v;
}

std::string Config::choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed)
{
    const std::string v = text(key, fallback);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
        std::string opts;
        for (const auto& a : allowed)
            opts += (opts.empty() ? "" : "|") + a;
        throw InvalidConfig("key '" + key + "': expected one of " + opts + ", got " + v);
    }
    return v;
}

std::vector<std::string> Config::list(const std::string& key, const std::string& fallback)
{
    std::vector<std::string> out;
    std::stringstream ss(text(key, fallback));
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(trim(item));
    std::string canon;
    for (const auto& s : out)
        canon += (canon.empty() ? "" : ",") + s;
    effective_[key] = canon;
    return out;
}

void Config::reject_unknown() const
{
    std::string bad;
    for (const auto& kv : values_)
        if (!consumed_.count(kv.first))
            bad += (bad.empty() ? "" : ", ") + kv.first;
    if (!bad.empty())
        throw InvalidConfig("unknown config keys for this command: " + bad);
}

void RunContext::seal()
{
    config.reject_unknown();
    std::string canon = "command=" + command + "\nseed=" + std::to_string(seed) + "\n";
    for (const auto& kv : config.effective())
        canon += kv.first + "=" + kv.second + "\n";
    config_hash = "fnv1a64:" + hex64(fnv1a64(canon));
}

nlohmann::ordered_json RunContext::meta() const
{
    nlohmann::ordered_json m;
    m["tool"] = "rydmagic";
    m["version"] = RYDMAGIC_VERSION;
    m["command"] = command;
    m["config_hash"] = config_hash;
    m["seed"] = seed;
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& kv : config.effective())
        c[kv.first] = kv.second;
    m["config"] = c;
    return m;
}

std::string RunContext::csv_preamble() const
{
    std::string s = "# rydmagic " RYDMAGIC_VERSION "\n# command: " + command + "\n# config_hash: " + config_hash +
                    "\n# seed: " + std::to_string(seed) + "\n";
    for (const auto& kv : config.effective())
        s += "# " + kv.first + " = " + kv.second + "\n";
    return s;
}

namespace {

nlohmann::json task_to_json(long task, const TaskOutput& out)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : out.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (double v : r)
            row.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
        rows.push_back(row);
    }
    return {{"task", task}, {"rows", rows}, {"status", out.status}};
}

TaskOutput task_from_json(const nlohmann::json& j)
{
    TaskOutput out;
    for (const auto& r : j.at("rows")) {
        std::vector<double> row;
        for (const auto& v : r)
            row.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
        out.rows.push_back(std::move(row));
    }
    out.status = j.at("status").get<std::vector<std::string>>();
    if (out.status.size() != out.rows.size())
        throw std::runtime_error("row/status mismatch");
    return out;
}

}  // namespace

Checkpoint::Checkpoint(std::filesystem::path path, const std::string& config_hash, bool resume) : path_(std::move(path))
{
    if (resume && std::filesystem::exists(path_)) {
        std::ifstream in(path_);
        std::string line;
        if (std::getline(in, line)) {
            nlohmann::json head;
            try {
                head = nlohmann::json::parse(line);
            } catch (const std::exception&) {
                throw InvalidConfig("unreadable checkpoint header in " + path_.string());
            }
            if (head.value("config_hash", std::string{}) != config_hash)
                throw InvalidConfig("checkpoint " + path_.string() + " belongs to a different configuration (" +
                                    head.value("config_hash", std::string{"?"}) + ")");
            while (std::getline(in, line)) {
                // a torn final line from an interrupted write is dropped
                try {
                    const auto j = nlohmann::json::parse(line);
                    done_[j.at("task").get<long>()] = task_from_json(j);
                } catch (const std::exception&) {
                }
            }
        }
    }
    // rewrite the surviving entries so the file ends on a clean line
    std::ofstream out(path_, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write checkpoint " + path_.string());
    out << nlohmann::json{{"config_hash", config_hash}}.dump() << '\n';
    for (const auto& kv : done_)
        out << task_to_json(kv.first, kv.second).dump() << '\n';
}

void Checkpoint::put(long task, const TaskOutput& out)
{
    const std::string line = task_to_json(task, out).dump();
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream f(path_, std::ios::app);
    f << line << '\n';
    f.flush();
    done_[task] = out;
}

void Checkpoint::remove() { std::filesystem::remove(path_); }

std::vector<TaskOutput> run_tasks(RunContext& ctx, long n_tasks, const std::function<TaskOutput(long)>& task)
{
    Checkpoint ckpt(ctx.out / (ctx.command + ".checkpoint.jsonl"), ctx.config_hash, ctx.resume);
    std::vector<TaskOutput> results(static_cast<size_t>(n_tasks));
    std::vector<long> todo;
    for (long k = 0; k < n_tasks; ++k) {
        if (ckpt.has(k))
            results[static_cast<size_t>(k)] = ckpt.get(k);
        else
            todo.push_back(k);
    }
    if (ctx.resume)
        std::cerr << "[" << ctx.command << "] resumed " << (n_tasks - static_cast<long>(todo.size())) << " of " << n_tasks
                  << " tasks from checkpoint\n";
    std::mutex log_mutex;
    long finished = 0;
    parallel_for(static_cast<long>(todo.size()), ctx.threads, [&](long i) {
        const long k = todo[static_cast<size_t>(i)];
        TaskOutput out;
        try {
            out = task(k);
        } catch (const std::exception& e) {
            out = TaskOutput{};
            out.error = e.what();
        }
        if (out.error.empty())
            ckpt.put(k, out);
        results[static_cast<size_t>(k)] = std::move(out);
        std::lock_guard<std::mutex> lock(log_mutex);
        ++finished;
        const long total = static_cast<long>(todo.size());
        if (finished == total || finished % std::max<long>(1, total / 10) == 0)
            std::cerr << "[" << ctx.command << "] " << finished << "/" << total << " tasks\n";
    });
    return results;
}

Report assemble(const std::vector<std::string>& columns, const std::vector<TaskOutput>& tasks)
{
    Report r;
    r.table.columns = columns;
    for (size_t k = 0; k < tasks.size(); ++k) {
        if (!tasks[k].error.empty()) {
            r.task_errors.push_back("task " + std::to_string(k) + ": " + tasks[k].error);
            continue;
        }
        for (size_t i = 0; i < tasks[k].rows.size(); ++i)
            r.table.add_row(tasks[k].rows[i], tasks[k].status[i]);
    }
    return r;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int write_outputs(const RunContext& ctx, const std::string& stem, const Report& report)
{
    const auto& t = report.table;
    write_text(ctx.out / (stem + ".csv"), ctx.csv_preamble() + t.to_csv());

    nlohmann::ordered_json j;
    j["meta"] = ctx.meta();
    j["summary"] = report.summary;
    const auto body = nlohmann::ordered_json::parse(t.to_json());
    j["columns"] = body["columns"];
    j["rows"] = body["rows"];
    j["status"] = body["status"];
    write_text(ctx.out / (stem + ".json"), j.dump(1) + "\n");

    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (size_t i = 0; i < t.status.size(); ++i)
        if (t.status[i] != "ok")
            failures.push_back({{"row", i}, {"status", t.status[i]}});
    const int code = (failures.empty() && report.task_errors.empty()) ? 0 : 1;

    nlohmann::ordered_json m;
    m["meta"] = ctx.meta();
    m["outputs"] = {stem + ".csv", stem + ".json"};
    m["rows"] = t.rows.size();
    m["failed_rows"] = failures.size();
    m["failures"] = failures;
    m["task_errors"] = report.task_errors;
    m["complete"] = report.task_errors.empty();
    m["exit_code"] = code;
    write_text(ctx.out / "manifest.json", m.dump(1) + "\n");
    return code;
}

int completed_run(const RunContext& ctx)
{
    const auto path = ctx.out / "manifest.json";
    if (!std::filesystem::exists(path))
        return -1;
    nlohmann::json m;
    try {
        std::ifstream in(path);
        m = nlohmann::json::parse(in);
    } catch (const std::exception&) {
        return -1;
    }
    const std::string recorded = m.value("meta", nlohmann::json::object()).value("config_hash", std::string{});
    if (recorded != ctx.config_hash)
        throw InvalidConfig("cannot resume: " + ctx.out.string() + " holds a run with config hash " + recorded);
    try {
        if (!m.at("complete").get<bool>())
            return -1;
        for (const auto& f : m.at("outputs"))
            if (!std::filesystem::exists(ctx.out / f.get<std::string>()))
                return -1;
        return m.at("exit_code").get<int>();
    } catch (const std::exception&) {
        return -1;
    }
}

}  // namespace rydmagic::cli
