#include <opencv2/imgcodecs.hpp>
#include <stdexcept>

#include "rope/oba.hpp"

namespace rope {

ImageBuffer LoadPng(const std::string& path) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) throw std::runtime_error("cannot read image: " + path);
  ImageBuffer img;
  img.width = bgr.cols;
  img.height = bgr.rows;
  img.data.resize(static_cast<size_t>(bgr.cols) * bgr.rows * 3);
  for (int y = 0; y < bgr.rows; ++y)
    for (int x = 0; x < bgr.cols; ++x) {
      const auto px = bgr.at<cv::Vec3b>(y, x);
      img.At(y, x, 0) = px[2];
      img.At(y, x, 1) = px[1];
      img.At(y, x, 2) = px[0];
    }
  return img;
}

void SavePng(const ImageBuffer& img, const std::string& path) {
  cv::Mat bgr(img.height, img.width, CV_8UC3);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      bgr.at<cv::Vec3b>(y, x) = {img.At(y, x, 2), img.At(y, x, 1), img.At(y, x, 0)};
  if (!cv::imwrite(path, bgr)) throw std::runtime_error("cannot write image: " + path);
}

}  // namespace rope
