#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydmagic/scan.hpp"

namespace rydmagic::cli {

// Anything wrong with the configuration; maps to exit code 2.
class InvalidConfig : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(const std::string& text);
std::string hex64(uint64_t v);

// Flat "key = value" text; '#' starts a comment. Every read records the resolved value so the
// effective configuration (defaults included) can be hashed and echoed into outputs.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin);
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string raw(const std::string& key) const;

    double real(const std::string& key, double fallback);
    long integer(const std::string& key, long fallback);
    bool flag(const std::string& key, bool fallback);
    std::string text(const std::string& key, const std::string& fallback);
    std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed);
    std::vector<std::string> list(const std::string& key, const std::string& fallback);

    // Keys the caller consumed without recording them in the effective set.
    void ignore(const std::string& key) { consumed_.insert(key); }
    // Throws InvalidConfig naming every key that was never read.
    void reject_unknown() const;

    const std::map<std::string, std::string>& effective() const { return effective_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> effective_;
    std::set<std::string> consumed_;
};

struct RunContext {
    std::string command;
    uint64_t seed = 1;
    int threads = 1;
    bool resume = false;
    std::filesystem::path out;
    Config config;

    // Fixed after the command has read all of its keys.
    std::string config_hash;

    // Command, seed and effective keys; threads and paths never enter the hash.
    void seal();
    nlohmann::ordered_json meta() const;
    std::string csv_preamble() const;
};

// Rows produced by one unit of work. `error` is set when the task itself threw.
struct TaskOutput {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> status;
    std::string error;
};

// Append-only JSON-lines file; the first line carries the config hash.
class Checkpoint {
public:
    Checkpoint(std::filesystem::path path, const std::string& config_hash, bool resume);

    bool has(long task) const { return done_.count(task) != 0; }
    const TaskOutput& get(long task) const { return done_.at(task); }
    size_t size() const { return done_.size(); }
    void put(long task, const TaskOutput& out);
    void remove();

private:
    std::filesystem::path path_;
    std::map<long, TaskOutput> done_;
    std::mutex mutex_;
};

// Runs tasks [0, n) on the context's threads, skipping those restored from the checkpoint.
std::vector<TaskOutput> run_tasks(RunContext& ctx, long n_tasks, const std::function<TaskOutput(long)>& task);

struct Report {
    ScanResult table;
    std::vector<std::string> task_errors;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

Report assemble(const std::vector<std::string>& columns, const std::vector<TaskOutput>& tasks);

// Writes <stem>.csv, <stem>.json and manifest.json; returns the exit code (0, or 1 on any failure).
int write_outputs(const RunContext& ctx, const std::string& stem, const Report& report);

// Exit code recorded by a previous complete run with the same hash, or -1.
// Throws InvalidConfig when the directory holds a run with a different hash.
int completed_run(const RunContext& ctx);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rydmagic::cli
