#include "wfsvm/error.hpp"
#include "wfsvm/metrics.hpp"
#include "wfsvm/random.hpp"
#include "wfsvm/svm.hpp"
#include "wfsvm/textio.hpp"

#include <gtest/gtest.h>

using namespace wfsvm;

TEST(Confusion, Accumulate)
{
    ConfusionMatrix cm;
    cm = accumulate(Label::Benign, Label::Benign, cm);
    cm = accumulate(Label::Malignant, Label::Malignant, cm);
    cm = accumulate(Label::Malignant, Label::Benign, cm);
    cm = accumulate(Label::Benign, Label::Malignant, cm);
    cm = accumulate(Label::Benign, Label::Benign, cm);
    EXPECT_EQ(cm, (ConfusionMatrix{2, 1, 1, 1}));
    EXPECT_EQ(cm.total(), 5u);
}

TEST(Report, TableCountsTextureLinear)
{
    ConfusionMatrix cm{34, 23, 1, 0};
    auto r = report(cm, 7);
    ASSERT_TRUE(r.sensitivity && r.specificity);
    EXPECT_EQ(*r.sensitivity, 1.0);
    EXPECT_NEAR(*r.specificity, 0.9583, 5e-5);
    EXPECT_NEAR(r.accuracy, 0.9828, 5e-5);
    EXPECT_EQ(rounded_percent(r.accuracy), 98);
    EXPECT_EQ(rounded_percent(*r.sensitivity), 100);
    EXPECT_EQ(rounded_percent(*r.specificity), 96);
    EXPECT_EQ(r.misclassified_benign, 0u);
    EXPECT_EQ(r.misclassified_malignant, 1u);
    EXPECT_EQ(r.support_vector_count, 7u);
}

TEST(Report, PerfectAndAbsent)
{
    auto r = report(ConfusionMatrix{10, 10, 0, 0}, 0);
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(*r.sensitivity, 1.0);
    EXPECT_EQ(*r.specificity, 1.0);

    auto s = report(ConfusionMatrix{0, 3, 1, 0}, 0);
    EXPECT_FALSE(s.sensitivity);
    EXPECT_EQ(*s.specificity, 0.75);
    EXPECT_FALSE(report(ConfusionMatrix{2, 0, 0, 0}, 0).specificity);
    EXPECT_THROW(report(ConfusionMatrix{}, 0), ValidationError);
}

TEST(Report, PositiveClassSwap)
{
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionMatrix cm{1 + rng.index(20), 1 + rng.index(20), rng.index(5), rng.index(5)};
        ConfusionMatrix swapped{cm.tn, cm.tp, cm.fn, cm.fp};
        auto a = report(cm, 0), b = report(swapped, 0);
        EXPECT_EQ(a.accuracy, b.accuracy);
        EXPECT_EQ(a.sensitivity, b.specificity);
        EXPECT_EQ(a.specificity, b.sensitivity);
        EXPECT_EQ(a.accuracy, static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()));
    }
}

TEST(Report, UsesModelSupportVectorCount)
{
    std::vector<std::vector<double>> x{{-1}, {1}, {3}};
    auto model = train(x, std::vector<int>{-1, 1, 1}, TrainConfig{}, KernelSpec::linear());
    EXPECT_EQ(report(ConfusionMatrix{1, 1, 0, 0}, model).support_vector_count, model.support_vector_count());
}

TEST(RoundedPercent, HalfAwayFromZero)
{
    EXPECT_EQ(rounded_percent(0.985), 99);
    EXPECT_EQ(rounded_percent(0.125), 13);
    EXPECT_EQ(rounded_percent(0.0), 0);
    EXPECT_EQ(rounded_percent(1.0), 100);
}

TEST(Formatting, TableAndCsv)
{
    std::vector<ReportRow> rows{{"texture", "svm-linear", report(ConfusionMatrix{34, 23, 1, 0}, 12)},
                                {"statistical+texture", "wfsvm-weighted_diagonal", report(ConfusionMatrix{0, 5, 0, 0}, 3)}};
    const auto table_text = format_report_table(rows);
    auto table = split_lines(table_text);
    ASSERT_GE(table.size(), 4u);
    EXPECT_NE(table[0].find("Accuracy"), std::string::npos);
    EXPECT_NE(table[2].find("0.9828 (98)"), std::string::npos);
    EXPECT_NE(table[2].find("0.9583 (96)"), std::string::npos);
    EXPECT_NE(table[3].find("n/a"), std::string::npos);
    // Columns line up: every body row starts its second column where the header does.
    const auto col = table[0].find("Classifier");
    EXPECT_EQ(table[2].find("svm-linear"), col);
    EXPECT_EQ(table[3].find("wfsvm-weighted_diagonal"), col);

    const auto csv_text = format_report_csv(rows);
    auto csv = split_lines(csv_text);
    ASSERT_EQ(csv.size(), 3u);
    EXPECT_EQ(csv[0], "feature_type,classifier,misclassified_benign,misclassified_malignant,accuracy,accuracy_pct,"
                      "sensitivity,sensitivity_pct,specificity,specificity_pct,support_vectors");
    auto cells = split_char(csv[1], ',');
    ASSERT_EQ(cells.size(), 11u);
    EXPECT_EQ(cells[0], "texture");
    EXPECT_EQ(cells[5], "98");
    EXPECT_EQ(cells[4], "0.9828");
    EXPECT_EQ(cells[6], "1.0000");
    EXPECT_EQ(cells[10], "12");
    EXPECT_EQ(split_char(csv[2], ',')[6], "NA");
}
