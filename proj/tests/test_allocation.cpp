#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nefa/allocation.hpp"

using nefa::FeatureAllocation;

TEST_CASE("relabel assigns dense labels by first appearance") {
    std::vector<std::vector<std::uint64_t>> raw = {
        {17, 4}, {}, {4, 90, 17}, {90, 1000}};
    std::vector<std::uint64_t> ids;
    FeatureAllocation a = nefa::relabel_rows(raw, &ids);
    a.validate();
    CHECK(a.n_objects == 4);
    CHECK(a.n_features() == 4);
    // First appearance order: 17, 4, 90, 1000; rows sorted by dense label.
    CHECK(ids == std::vector<std::uint64_t>{17, 4, 90, 1000});
    CHECK(a.rows[0] == std::vector<std::uint32_t>{1, 2});
    CHECK(a.rows[1].empty());
    CHECK(a.rows[2] == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(a.rows[3] == std::vector<std::uint32_t>{3, 4});
    CHECK(a.first_object == std::vector<std::uint32_t>{1, 1, 3, 4});
    CHECK(a.sizes() == std::vector<std::uint32_t>{2, 2, 2, 1});
}

TEST_CASE("validate rejects structural violations") {
    FeatureAllocation a;
    a.n_objects = 2;
    a.rows = {{1}, {1, 2}};
    a.first_object = {1, 2};
    CHECK_NOTHROW(a.validate());

    FeatureAllocation bad = a;
    bad.rows[1] = {2, 1};  // unsorted row
    CHECK_THROWS_AS(bad.validate(), std::logic_error);

    bad = a;
    bad.rows[1] = {1, 1};  // duplicate within a row
    CHECK_THROWS_AS(bad.validate(), std::logic_error);

    bad = a;
    bad.rows[0] = {2};  // label 2 appears before its first_object row
    CHECK_THROWS_AS(bad.validate(), std::logic_error);

    bad = a;
    bad.first_object = {1, 3};  // first_object beyond n_objects
    CHECK_THROWS_AS(bad.validate(), std::logic_error);

    bad = a;
    bad.rows[1] = {1, 3};  // label out of range
    CHECK_THROWS_AS(bad.validate(), std::logic_error);

    bad = a;
    bad.rows = {{1}, {1}};  // label 2 never appears: empty column
    CHECK_THROWS_AS(bad.validate(), std::logic_error);
}

TEST_CASE("head restricts and stays dense") {
    std::vector<std::vector<std::uint64_t>> raw = {{5}, {5, 6}, {7}, {6, 8}};
    FeatureAllocation a = nefa::relabel_rows(raw);
    FeatureAllocation h = nefa::head(a, 2);
    h.validate();
    CHECK(h.n_objects == 2);
    CHECK(h.n_features() == 2);  // labels 3 (=7) and 4 (=8) first appear later
    CHECK(h.rows[0] == std::vector<std::uint32_t>{1});
    CHECK(h.rows[1] == std::vector<std::uint32_t>{1, 2});

    FeatureAllocation full = nefa::head(a, 4);
    full.validate();
    CHECK(full.n_features() == a.n_features());
    CHECK_THROWS_AS(nefa::head(a, 5), std::out_of_range);
}

TEST_CASE("empty allocation is valid") {
    FeatureAllocation a;
    CHECK_NOTHROW(a.validate());
    CHECK(a.n_features() == 0);
    CHECK(a.sizes().empty());

    std::vector<std::vector<std::uint64_t>> raw = {{}, {}};
    FeatureAllocation b = nefa::relabel_rows(raw);
    b.validate();
    CHECK(b.n_objects == 2);
    CHECK(b.n_features() == 0);
}
