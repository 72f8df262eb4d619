import { TutorApi } from "./api.js";
import { QuizController } from "./quiz.js";
import { QuizView } from "./render.js";

const api = new TutorApi("");
const controller = new QuizController(api);
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const view = new QuizView(root, controller);
view.mount();
void controller.loadSections();
