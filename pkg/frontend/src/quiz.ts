/**
 * Quiz state machine. Every displayed value originates from a service
 * response; the controller holds no tutoring logic of its own.
 *
 * An in-flight guard makes answer submission single-shot: while a request is
 * pending, further submissions are ignored, and a server-side 409 (stale or
 * duplicate answer) is resolved by refetching the outstanding question.
 */

import {
  ApiError,
  Progress,
  Question,
  SectionInfo,
  TutorApi,
} from "./api.js";

export type QuizPhase =
  | "idle"
  | "loading"
  | "question"
  | "checking"
  | "complete"
  | "error";

export interface UiSession {
  sessionId: string | null;
  sectionId: string | null;
  phase: QuizPhase;
  question: Question | null;
  progress: Progress | null;
  feedback: { correct: boolean } | null;
  error: string | null;
}

type Listener = (session: UiSession) => void;

export class QuizController {
  readonly session: UiSession = {
    sessionId: null,
    sectionId: null,
    phase: "idle",
    question: null,
    progress: null,
    feedback: null,
    error: null,
  };

  private curriculumId: string | null = null;
  private sections: SectionInfo[] = [];
  private inFlight = false;
  private listeners: Listener[] = [];

  constructor(private readonly api: TutorApi) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.session);
    }
  }

  availableSections(): SectionInfo[] {
    return this.sections;
  }

  async loadSections(): Promise<void> {
    try {
      const info = await this.api.getCurriculum();
      this.curriculumId = info.curriculum_id;
      this.sections = info.sections;
      this.session.error = null;
    } catch (err) {
      this.session.phase = "error";
      this.session.error = err instanceof Error ? err.message : String(err);
    }
    this.notify();
  }

  async startQuiz(sectionId: string): Promise<void> {
    this.session.sectionId = sectionId; // kept for retry after failures
    if (this.curriculumId === null) {
      await this.loadSections();
      if (this.curriculumId === null) return; // error state already set
    }
    this.session.phase = "loading";
    this.notify();
    try {
      const created = await this.api.createSession(this.curriculumId, sectionId);
      this.session.sessionId = created.session_id;
      this.session.progress = created.progress;
      await this.fetchNext();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Attach to an existing session (page reload / service restart). */
  async attachSession(sessionId: string): Promise<void> {
    this.session.sessionId = sessionId;
    this.session.phase = "loading";
    this.notify();
    await this.fetchNext();
  }

  async submitAnswer(choiceIndex: number): Promise<void> {
    if (this.inFlight || this.session.phase !== "question") {
      return; // guard: at most one answer per outstanding question
    }
    const question = this.session.question;
    const sessionId = this.session.sessionId;
    if (!question || !sessionId) return;
    this.inFlight = true;
    this.session.phase = "checking";
    this.notify();
    try {
      const result = await this.api.submitAnswer(
        sessionId,
        question.problem_id,
        choiceIndex,
      );
      this.session.feedback = { correct: result.correct };
      this.session.progress = result.progress;
      if (result.complete) {
        this.session.phase = "complete";
        this.session.question = null;
        this.notify();
      } else {
        await this.fetchNext();
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.fetchNext(); // answer raced something; re-sync
      } else {
        this.fail(err);
      }
    } finally {
      this.inFlight = false;
    }
  }

  /** Recover from an error: re-fetch the outstanding question, or redo the
   *  failed session creation, or fall back to the section picker. */
  async retry(): Promise<void> {
    if (this.session.sessionId !== null) {
      this.session.phase = "loading";
      this.notify();
      await this.fetchNext();
    } else if (this.session.sectionId !== null) {
      await this.startQuiz(this.session.sectionId);
    } else {
      this.session.phase = "idle";
      this.session.error = null;
      this.notify();
    }
  }

  async fetchDebugState(): Promise<Record<string, unknown> | null> {
    if (this.session.sessionId === null) return null;
    return this.api.getState(this.session.sessionId);
  }

  private async fetchNext(): Promise<void> {
    const sessionId = this.session.sessionId;
    if (!sessionId) return;
    try {
      const question = await this.api.nextQuestion(sessionId);
      this.session.question = question;
      this.session.phase = "question";
      this.session.error = null;
      this.notify();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // session is complete; the error body carries the final progress
        const body = err.body as { progress?: Progress } | undefined;
        if (body?.progress) {
          this.session.progress = body.progress;
        }
        this.session.phase = "complete";
        this.session.question = null;
        this.notify();
      } else {
        this.fail(err);
      }
    }
  }

  private fail(err: unknown): void {
    this.session.phase = "error";
    this.session.error = err instanceof Error ? err.message : String(err);
    this.notify();
  }
}
