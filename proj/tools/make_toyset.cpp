// Writes the bundled synthetic two-domain toy dataset: tube-phantom
// fly-through renders as the virtual domain, warm-shifted noisy variants of
// a disjoint render batch as the stand-in real domain.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "endo/toy.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate the bundled two-domain toy dataset"};
    std::string out_dir = "toyset";
    int count = 200;
    int image_size = 64;
    std::uint64_t seed = 7;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--count", count, "images per domain");
    app.add_option("--size", image_size, "image side in pixels");
    app.add_option("--seed", seed, "generation seed");
    CLI11_PARSE(app, argc, argv);

    try {
        auto ds = endo::toy::make_toy_dataset(count, image_size, seed);
        endo::toy::write_toy_dataset(out_dir, ds);
        std::cout << "wrote " << ds.virtual_images.size() << " virtual and "
                  << ds.real_images.size() << " real images under " << out_dir
                  << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
