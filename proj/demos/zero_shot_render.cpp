// Renders an AG News style zero-shot input and picks a class from a logits
// vector the way a tuned classifier's output would be read.

#include <iostream>
#include <vector>

#include "sstune/format.hpp"
#include "sstune/predict.hpp"

int main() {
  sstune::TaskSpec task;
  task.class_names = {"politics", "sports", "business", "technology"};
  task.template_text = "This text is about [].";
  task.n_model = 20;

  const auto input = sstune::render_inference(
      "Valve's sequel sets a new bar for first-person shooters.", task,
      sstune::IndicatorScheme::alphabet());
  std::cout << input << "\n";

  // Slot 7 is a pad; constrained prediction only looks at the 4 class slots.
  std::vector<double> logits(20, 0.0);
  logits[3] = 2.5;
  logits[7] = 4.0;
  const auto label = sstune::constrained_predict(logits, task.num_labels());
  std::cout << "predicted: " << task.class_names[label] << "\n";
}
