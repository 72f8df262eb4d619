/**
 * DOM view over the quiz controller. Pure render of UiSession: everything on
 * screen comes from service payloads. Problem difficulties and correct
 * answers are never part of those payloads, so they can never reach the DOM.
 */

import { ConceptProgress } from "./api.js";
import { QuizController, UiSession } from "./quiz.js";

const BELIEF_LABEL: Record<ConceptProgress["belief"], string> = {
  locked: "locked",
  unlocked_unmastered: "in progress",
  mastered: "mastered",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class QuizView {
  private debugVisible = false;
  private debugPayload: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly controller: QuizController,
  ) {}

  mount(): void {
    this.controller.onChange(() => this.render());
    this.render();
  }

  render(): void {
    const session = this.controller.session;
    this.root.textContent = "";
    const shell = el("div", "quiz-shell");
    shell.appendChild(this.header(session));
    if (session.phase === "error") {
      shell.appendChild(this.errorPanel(session));
    } else if (session.phase === "idle") {
      shell.appendChild(this.sectionPicker());
    } else {
      if (session.feedback) {
        shell.appendChild(this.feedbackBanner(session));
      }
      if (session.phase === "complete") {
        shell.appendChild(this.completionBanner(session));
      } else if (session.question) {
        shell.appendChild(this.questionCard(session));
      } else {
        shell.appendChild(el("p", "loading", "loading…"));
      }
      if (session.progress) {
        shell.appendChild(this.progressPanel(session));
      }
      shell.appendChild(this.debugPanel());
    }
    this.root.appendChild(shell);
  }

  private header(session: UiSession): HTMLElement {
    const header = el("header", "quiz-header");
    header.appendChild(el("h1", undefined, "Adaptive quiz"));
    if (session.sectionId) {
      header.appendChild(el("span", "section-tag", session.sectionId));
    }
    return header;
  }

  private sectionPicker(): HTMLElement {
    const panel = el("section", "section-picker");
    panel.appendChild(el("h2", undefined, "Pick a section"));
    const sections = this.controller.availableSections();
    if (!sections.length) {
      panel.appendChild(el("p", undefined, "no sections loaded"));
    }
    for (const section of sections) {
      const button = el("button", "section-choice", `${section.title} (${section.concepts} concepts)`);
      button.dataset.sectionId = section.id;
      button.addEventListener("click", () => {
        void this.controller.startQuiz(section.id);
      });
      panel.appendChild(button);
    }
    return panel;
  }

  private questionCard(session: UiSession): HTMLElement {
    const question = session.question!;
    const card = el("section", "question-card");
    card.appendChild(el("p", "prompt", question.prompt));
    const list = el("div", "choices");
    const busy = session.phase === "checking";
    question.choices.forEach((choice, index) => {
      const button = el("button", "choice", choice);
      button.dataset.choiceIndex = String(index);
      button.disabled = busy; // no double submission while in flight
      button.addEventListener("click", () => {
        void this.controller.submitAnswer(index);
      });
      list.appendChild(button);
    });
    card.appendChild(list);
    return card;
  }

  private feedbackBanner(session: UiSession): HTMLElement {
    const correct = session.feedback!.correct;
    return el(
      "div",
      `feedback ${correct ? "feedback-correct" : "feedback-incorrect"}`,
      correct ? "Correct!" : "Incorrect",
    );
  }

  private completionBanner(session: UiSession): HTMLElement {
    const banner = el("section", "completion");
    banner.appendChild(el("h2", undefined, "Section complete"));
    const progress = session.progress;
    if (progress) {
      const mastered = progress.concepts.filter(
        (c) => c.belief === "mastered",
      ).length;
      banner.appendChild(
        el(
          "p",
          "summary",
          `${progress.questions_answered} questions answered, ` +
            `${mastered} of ${progress.concepts.length} concepts mastered`,
        ),
      );
    }
    return banner;
  }

  private progressPanel(session: UiSession): HTMLElement {
    const progress = session.progress!;
    const panel = el("section", "progress-panel");
    panel.appendChild(el("h2", undefined, "Progress"));
    for (const concept of progress.concepts) {
      const row = el("div", `concept-row belief-${concept.belief}`);
      row.dataset.conceptId = concept.concept_id;
      row.appendChild(el("span", "concept-name", concept.concept_id));
      row.appendChild(el("span", "concept-belief", BELIEF_LABEL[concept.belief]));
      const bar = el("div", "bar");
      const fill = el("div", "bar-fill");
      const fraction =
        concept.problems_total > 0
          ? concept.problems_mastered / concept.problems_total
          : 0;
      fill.style.width = `${Math.round(fraction * 100)}%`;
      bar.appendChild(fill);
      row.appendChild(bar);
      row.appendChild(
        el(
          "span",
          "concept-count",
          `${concept.problems_mastered}/${concept.problems_total}`,
        ),
      );
      panel.appendChild(row);
    }
    return panel;
  }

  private errorPanel(session: UiSession): HTMLElement {
    const panel = el("section", "error-panel");
    panel.appendChild(el("p", "error-message", session.error ?? "unknown error"));
    const retry = el("button", "retry", "Retry");
    retry.addEventListener("click", () => {
      void this.controller.retry();
    });
    panel.appendChild(retry);
    return panel;
  }

  private debugPanel(): HTMLElement {
    const panel = el("section", "debug-panel");
    const toggle = el(
      "button",
      "debug-toggle",
      this.debugVisible ? "Hide diagnostics" : "Show diagnostics",
    );
    toggle.addEventListener("click", () => {
      if (this.debugVisible) {
        this.debugVisible = false;
        this.debugPayload = null;
        this.render();
        return;
      }
      void this.controller.fetchDebugState().then((state) => {
        this.debugVisible = true;
        this.debugPayload = JSON.stringify(state, null, 2);
        this.render();
      });
    });
    panel.appendChild(toggle);
    if (this.debugVisible && this.debugPayload !== null) {
      const pre = el("pre", "debug-dump");
      pre.textContent = this.debugPayload;
      panel.appendChild(pre);
    }
    return panel;
  }
}
