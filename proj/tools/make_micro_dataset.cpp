// Regenerates the bundled 8x8 digit dataset:
//   make_micro_dataset <dir> [--train N] [--test N] [--seed S]

#include <CLI11.hpp>

#include <iostream>

#include "lens/micro_dataset.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the micro digit dataset"};
    std::string dir;
    std::size_t train_count = 500;
    std::size_t test_count = 200;
    std::uint64_t seed = 20240229;
    app.add_option("dir", dir, "output directory")->required();
    app.add_option("--train", train_count, "training images");
    app.add_option("--test", test_count, "evaluation images");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    const auto train = lens::make_micro_digits(train_count, seed, "train");
    const auto test = lens::make_micro_digits(test_count, seed + 1, "test");
    lens::write_dataset(train, dir, "train.csv");
    lens::write_dataset(test, dir, "test.csv");
    std::cout << "wrote " << train.size() << " training and " << test.size() << " evaluation images to " << dir << "\n";
    return 0;
}
