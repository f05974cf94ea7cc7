#include "nefa/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "nefa/errors.hpp"

namespace nefa {

std::size_t Dataset::distinct_features() const {
    std::unordered_set<std::uint64_t> ids;
    for (const auto& row : rows) ids.insert(row.begin(), row.end());
    return ids.size();
}

Dataset read_dataset(std::istream& in) {
    Dataset ds;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] == '#') continue;
        std::vector<std::uint64_t> row;
        std::unordered_set<std::uint64_t> seen;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            std::uint64_t id = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw data_format_error("invalid feature id '" + tok + "'", lineno);
            if (!seen.insert(id).second)
                throw data_format_error("duplicate feature id " + std::to_string(id),
                                        lineno);
            row.push_back(id);
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_format_error("cannot open dataset file: " + path);
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& ds) {
    for (const auto& row : ds.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ' ';
            out << row[j];
        }
        out << '\n';
    }
}

void write_dataset_file(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw data_format_error("cannot write dataset file: " + path);
    write_dataset(out, ds);
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::size_t n_train) {
    if (n_train == 0 || n_train >= ds.n())
        throw std::out_of_range("split: need 0 < n_train < n");
    Dataset train, test;
    train.rows.assign(ds.rows.begin(), ds.rows.begin() + n_train);
    test.rows.assign(ds.rows.begin() + n_train, ds.rows.end());
    return {std::move(train), std::move(test)};
}

FeatureAllocation to_allocation(const Dataset& ds, std::vector<std::uint64_t>* label_ids) {
    return relabel_rows(ds.rows, label_ids);
}

Dataset to_dataset(const FeatureAllocation& a) {
    Dataset ds;
    ds.rows.reserve(a.rows.size());
    for (const auto& row : a.rows) ds.rows.emplace_back(row.begin(), row.end());
    return ds;
}

std::string format_real(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, p);
}

void KvRecord::set(const std::string& key, const std::string& value) {
    for (auto& item : items) {
        if (item.first == key) {
            item.second = value;
            return;
        }
    }
    items.emplace_back(key, value);
}

void KvRecord::set_real(const std::string& key, double value) { set(key, format_real(value)); }

void KvRecord::set_int(const std::string& key, long long value) {
    set(key, std::to_string(value));
}

const std::string* KvRecord::find(const std::string& key) const {
    for (const auto& item : items)
        if (item.first == key) return &item.second;
    return nullptr;
}

double KvRecord::get_real(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw data_format_error("missing key: " + key);
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw data_format_error("key " + key + " is not a real number: " + *v);
    }
}

long long KvRecord::get_int(const std::string& key) const {
    const std::string* v = find(key);
    if (!v) throw data_format_error("missing key: " + key);
    try {
        return std::stoll(*v);
    } catch (const std::exception&) {
        throw data_format_error("key " + key + " is not an integer: " + *v);
    }
}

KvRecord read_kv(std::istream& in) {
    KvRecord kv;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw data_format_error("expected key=value", lineno);
        kv.items.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return kv;
}

KvRecord read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_format_error("cannot open file: " + path);
    return read_kv(in);
}

void write_kv(std::ostream& out, const KvRecord& kv) {
    for (const auto& [k, v] : kv.items) out << k << '=' << v << '\n';
}

void write_kv_file(const std::string& path, const KvRecord& kv) {
    std::ofstream out(path);
    if (!out) throw data_format_error("cannot write file: " + path);
    write_kv(out, kv);
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw data_format_error("cannot write file: " + path);
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) impl_->out << ',';
        impl_->out << header[j];
    }
    impl_->out << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
        if (j) impl_->out << ',';
        impl_->out << fields[j];
    }
    impl_->out << '\n';
}

}  // namespace nefa
