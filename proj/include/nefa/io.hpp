#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nefa/allocation.hpp"

namespace nefa {

// Time-ordered dataset: one object per row, arbitrary nonnegative feature
// ids.  Row order is semantically binding (arrival order), never shuffled.
struct Dataset {
    std::vector<std::vector<std::uint64_t>> rows;

    std::size_t n() const { return rows.size(); }
    std::size_t distinct_features() const;
};

// Text format: one object per line, whitespace-separated nonnegative integer
// feature ids; an empty line is an object with no features; lines starting
// with '#' are comments.  Throws data_format_error with the line number on
// non-integer tokens or duplicate ids within a line.
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);
void write_dataset(std::ostream& out, const Dataset& ds);
void write_dataset_file(const std::string& path, const Dataset& ds);

// Prefix/suffix split preserving order; requires 0 < n_train < n.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::size_t n_train);

FeatureAllocation to_allocation(const Dataset& ds,
                                std::vector<std::uint64_t>* label_ids = nullptr);
Dataset to_dataset(const FeatureAllocation& a);

// Shortest exact decimal representation (round-trips through double).
std::string format_real(double x);

// Ordered key=value record; used for config files, estimate/error records
// and output manifests.
struct KvRecord {
    std::vector<std::pair<std::string, std::string>> items;

    void set(const std::string& key, const std::string& value);
    void set_real(const std::string& key, double value);
    void set_int(const std::string& key, long long value);
    const std::string* find(const std::string& key) const;
    double get_real(const std::string& key) const;
    long long get_int(const std::string& key) const;
};

KvRecord read_kv(std::istream& in);
KvRecord read_kv_file(const std::string& path);
void write_kv(std::ostream& out, const KvRecord& kv);
void write_kv_file(const std::string& path, const KvRecord& kv);

// Minimal CSV emitter: header row, then rows of preformatted fields.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<std::string>& fields);

private:
    struct Impl;
    Impl* impl_;
};

}  // namespace nefa
