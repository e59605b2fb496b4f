#include <catch_amalgamated.hpp>

#include <set>
#include <sstream>
#include <string>

#include "anyloss/data.hpp"

using namespace anyloss;
using Catch::Approx;

namespace {

CsvLoadResult parse(const std::string& text, const CsvOptions& o = {}) {
    std::istringstream in(text);
    return load_csv(in, "t", o);
}

}  // namespace

TEST_CASE("csv: basic parse, BOM, quotes, blank lines") {
    const auto r = parse("\xEF\xBB\xBF" "a,\"b\",label\n1,2,0\n\n3.5,-4e-1,1\n");
    CHECK(r.feature_names == std::vector<std::string>{"a", "b"});
    REQUIRE(r.data.size() == 2);
    CHECK(r.data.X(1, 0) == 3.5);
    CHECK(r.data.X(1, 1) == -0.4);
    CHECK(r.data.y == Labels{0, 1});
    CHECK(r.data.name == "t");
}

TEST_CASE("csv: missing values are dropped or rejected") {
    WarningHandler prev = set_warning_handler([](const std::string&) {});
    const auto r = parse("a,b,y\n1,NA,0\n2,3,1\n?,1,0\n4,5,\n6,7,0\n");
    set_warning_handler(prev);
    CHECK(r.dropped_rows == 3);
    CHECK(r.data.size() == 2);
    CsvOptions strict;
    strict.missing = MissingPolicy::Error;
    CHECK_THROWS_WITH(parse("a,b,y\n1,2,0\n1,,0\n", strict), Catch::Matchers::ContainsSubstring("t:3"));
}

TEST_CASE("csv: errors name the row and column") {
    CHECK_THROWS_WITH(parse("a,b,y\n1,x,0\n"), Catch::Matchers::ContainsSubstring("column 2"));
    CHECK_THROWS_WITH(parse("a,b,y\n1,2,0\n1,2\n"), Catch::Matchers::ContainsSubstring("t:3"));
    CHECK_THROWS_WITH(parse("a,b,y\n1,2,3\n"), Catch::Matchers::ContainsSubstring("not binary"));
    CHECK_THROWS_AS(parse(""), InputError);
    CHECK_THROWS_AS(parse("a,y\n"), InputError);
    CHECK_THROWS_AS(parse("y\n1\n"), InputError);
    CHECK_THROWS_AS(load_csv(std::string("/nonexistent.csv")), InputError);
}

TEST_CASE("csv: label map") {
    CsvOptions o;
    o.label_map = {{"M", 1}, {"B", 0}};
    const auto r = parse("a,diag\n1,M\n2,B\n", o);
    CHECK(r.data.y == Labels{1, 0});
    CHECK_THROWS_WITH(parse("a,diag\n1,X\n", o), Catch::Matchers::ContainsSubstring("not in label map"));
}

TEST_CASE("csv: write and read back") {
    const Dataset d = synth_imbalanced(20, 3, 0.25, 1.0, 2);
    std::ostringstream out;
    write_csv(out, d);
    const auto r = parse(out.str());
    CHECK(r.data.y == d.y);
    CHECK(r.data.X.isApprox(d.X, 1e-15));
}

TEST_CASE("bundled datasets load") {
    const std::string dir = ANYLOSS_DATA_DIR;
    const auto iris = load_csv(dir + "/iris_virginica.csv");
    CHECK(iris.data.size() == 150);
    CHECK(iris.data.positives() == 50);
    CHECK(iris.data.name == "iris_virginica");
    const auto wdbc = load_csv(dir + "/breast_cancer_wdbc.csv");
    CHECK(wdbc.data.size() == 569);
    CHECK(wdbc.data.features() == 30);
    CHECK(wdbc.data.positives() == 212);
    const auto wine = load_csv(dir + "/wine_class0.csv");
    CHECK(wine.data.size() == 178);
    CHECK(wine.data.positives() == 59);
}

TEST_CASE("synthetic generator") {
    const Dataset a = synth_imbalanced(1000, 4, 0.1, 2.0, 7);
    CHECK(a.size() == 1000);
    CHECK(a.features() == 4);
    CHECK(a.positives() == 100);
    CHECK(a.imbalance_ratio() == Approx(9.0));
    const Dataset b = synth_imbalanced(1000, 4, 0.1, 2.0, 7);
    CHECK(a.X == b.X);
    CHECK(a.y == b.y);
    // Class means are `separation` apart.
    Eigen::RowVectorXd mp = Eigen::RowVectorXd::Zero(4), mn = Eigen::RowVectorXd::Zero(4);
    for (std::size_t i = 0; i < a.size(); ++i) (a.y[i] ? mp : mn) += a.X.row(static_cast<Eigen::Index>(i));
    mp /= 100.0;
    mn /= 900.0;
    CHECK((mp - mn).norm() == Approx(2.0).margin(0.35));
    CHECK_THROWS_AS(synth_imbalanced(10, 2, 0.0, 1.0, 1), ContractError);
    CHECK_THROWS_AS(synth_imbalanced(10, 0, 0.5, 1.0, 1), ContractError);
}

TEST_CASE("stratified k-fold partitions and stratifies") {
    const Dataset d = synth_imbalanced(103, 2, 0.2, 1.0, 3);
    const FoldPlan p = stratified_kfold(d.y, 10, 5);
    REQUIRE(p.k() == 10);
    std::set<std::size_t> seen;
    std::size_t smallest = d.size(), largest = 0;
    for (std::size_t f = 0; f < p.k(); ++f) {
        smallest = std::min(smallest, p.folds[f].size());
        largest = std::max(largest, p.folds[f].size());
        std::size_t pos = 0;
        for (auto i : p.folds[f]) {
            CHECK(seen.insert(i).second);
            pos += d.y[i];
        }
        CHECK((pos == 2 || pos == 3));  // 21 positives over 10 folds
        CHECK(p.train_indices(f).size() + p.folds[f].size() == d.size());
    }
    CHECK(seen.size() == d.size());
    CHECK(largest - smallest <= 1);
    CHECK(stratified_kfold(d.y, 10, 5).folds == p.folds);

    const Labels ten(10, 0);
    CHECK(stratified_kfold(ten, 2, 1).k() == 2);
    CHECK_THROWS_AS(stratified_kfold(ten, 1, 1), ContractError);
    CHECK_THROWS_AS(stratified_kfold(ten, 11, 1), ContractError);
}

TEST_CASE("standardizer") {
    Matrix X(4, 2);
    X << 1, 5, 2, 5, 3, 5, 4, 5;
    const Standardizer s = Standardizer::fit(X);
    const Matrix Z = s.apply(X);
    CHECK(Z.col(0).mean() == Approx(0.0).margin(1e-15));
    CHECK(Z.col(0).array().square().mean() == Approx(1.0));
    CHECK(s.scale(1) == 1.0);
    CHECK(Z.col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dataset validation and subsets") {
    Dataset d = synth_imbalanced(10, 2, 0.3, 1.0, 1);
    const Dataset s = d.subset({0, 5, 9});
    CHECK(s.size() == 3);
    CHECK(s.X.row(1) == d.X.row(5));
    d.y.pop_back();
    CHECK_THROWS_AS(d.validate(), ContractError);
}
