/**
 * Typed client for the tutoring service API. The UI talks to the service
 * through this module only; no other network calls exist.
 */

export interface SectionInfo {
  id: string;
  title: string;
  concepts: number;
}

export interface CurriculumInfo {
  curriculum_id: string;
  sections: SectionInfo[];
}

export interface ConceptProgress {
  concept_id: string;
  belief: "locked" | "unlocked_unmastered" | "mastered";
  problems_total: number;
  problems_mastered: number;
}

export interface Progress {
  complete: boolean;
  questions_answered: number;
  concepts: ConceptProgress[];
}

export interface SessionCreated {
  session_id: string;
  seed: number;
  progress: Progress;
}

export interface Question {
  concept_id: string;
  problem_id: string;
  prompt: string;
  choices: string[];
}

export interface AnswerResult {
  correct: boolean;
  problem_mastered: boolean;
  concept_mastered: string | null;
  progress: Progress;
  complete: boolean;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly body: unknown = undefined,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

const defaultFetch: FetchLike = (input, init) => globalThis.fetch(input, init);

export class TutorApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = defaultFetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    let body: unknown = undefined;
    try {
      body = await response.json();
    } catch {
      /* non-JSON body; leave undefined */
    }
    if (!response.ok) {
      const detail =
        body && typeof body === "object" && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail, body);
    }
    return body as T;
  }

  getCurriculum(): Promise<CurriculumInfo> {
    return this.request<CurriculumInfo>("/api/curriculum");
  }

  createSession(
    curriculumId: string,
    sectionId: string,
    seed?: number,
  ): Promise<SessionCreated> {
    return this.request<SessionCreated>("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        curriculum_id: curriculumId,
        section_id: sectionId,
        ...(seed !== undefined ? { seed } : {}),
      }),
    });
  }

  nextQuestion(sessionId: string): Promise<Question> {
    return this.request<Question>(`/api/sessions/${sessionId}/next`);
  }

  submitAnswer(
    sessionId: string,
    problemId: string,
    choiceIndex: number,
  ): Promise<AnswerResult> {
    return this.request<AnswerResult>(`/api/sessions/${sessionId}/answer`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ problem_id: problemId, choice_index: choiceIndex }),
    });
  }

  getState(sessionId: string): Promise<Record<string, unknown>> {
    return this.request<Record<string, unknown>>(
      `/api/sessions/${sessionId}/state`,
    );
  }
}
