/**
 * Live end-to-end tests against the real tutoring service: a scripted
 * browser-style session driven through the DOM, the duplicate-submit race,
 * and crash-replay of the outstanding question across a service restart.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { request } from "node:http";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, FetchLike, Progress, TutorApi } from "../src/api.js";
import { QuizController } from "../src/quiz.js";
import { QuizView } from "../src/render.js";

// vitest runs with cwd = frontend/; the installed package lives one level up
const REPO_ROOT = resolve(process.cwd(), "..");
const PORT = 18311 + (process.pid % 512);
const BASE = `http://127.0.0.1:${PORT}`;

// happy-dom's fetch is built for document resources; drive the API over
// node:http directly so network behavior is under test control.
const nodeFetch: FetchLike = (input, init) =>
  new Promise((resolve, reject) => {
    const url = new URL(input);
    const req = request(
      {
        hostname: url.hostname,
        port: url.port,
        path: url.pathname + url.search,
        method: init?.method ?? "GET",
        headers: (init?.headers as Record<string, string>) ?? {},
      },
      (res) => {
        const chunks: Buffer[] = [];
        res.on("data", (chunk) => chunks.push(chunk));
        res.on("end", () =>
          resolve(
            new Response(Buffer.concat(chunks).toString("utf8"), {
              status: res.statusCode ?? 500,
              headers: { "content-type": "application/json" },
            }),
          ),
        );
      },
    );
    req.on("error", reject);
    if (init?.body) req.write(init.body);
    req.end();
  });

const CURRICULUM = {
  sections: [
    {
      id: "s1",
      title: "Single section",
      concepts: [
        {
          id: "c1",
          prerequisites: [],
          problems: [
            { id: "p1", difficulty: 3.0, prompt: "one plus one?",
              choices: ["2", "3"], correct_choice: 0 },
            { id: "p2", difficulty: 3.0, prompt: "two plus two?",
              choices: ["4", "5"], correct_choice: 0 },
          ],
        },
        {
          id: "c2",
          prerequisites: ["c1"],
          problems: [
            { id: "p3", difficulty: 3.0, prompt: "three plus three?",
              choices: ["6", "7"], correct_choice: 0 },
            { id: "p4", difficulty: 3.0, prompt: "four plus four?",
              choices: ["8", "9"], correct_choice: 0 },
          ],
        },
      ],
    },
  ],
};

let workDir: string;
let dataDir: string;
let curriculumPath: string;
let server: ChildProcess | null = null;

function startServer(): ChildProcess {
  const proc = spawn(
    "python3",
    [
      "-m", "bandit_tutor.cli", "serve",
      "--curriculum", curriculumPath,
      "--port", String(PORT),
      "--data-dir", dataDir,
    ],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  return proc;
}

async function waitReady(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await nodeFetch(`${BASE}/api/curriculum`);
      if (response.status === 200) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not become ready");
}

async function stopServer(): Promise<void> {
  if (server) {
    const exited = new Promise((resolve) => server!.once("exit", resolve));
    server.kill("SIGKILL");
    await exited; // the port is free once the process is gone
    server = null;
  }
}

async function waitFor(cond: () => boolean, ms = 10_000): Promise<void> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    if (cond()) return;
    await new Promise((r) => setTimeout(r, 5));
  }
  throw new Error("condition not met in time");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "tutor-ui-"));
  dataDir = join(workDir, "sessions");
  curriculumPath = join(workDir, "curriculum.json");
  writeFileSync(curriculumPath, JSON.stringify(CURRICULUM));
  server = startServer();
  await waitReady();
});

afterAll(async () => {
  await stopServer();
});

function makeUi(): { controller: QuizController; root: HTMLElement; api: TutorApi } {
  const api = new TutorApi(BASE, nodeFetch);
  const controller = new QuizController(api);
  const root = document.createElement("div");
  document.body.appendChild(root);
  new QuizView(root, controller).mount();
  return { controller, root, api };
}

async function clickChoice(
  controller: QuizController,
  root: HTMLElement,
  index: number,
): Promise<void> {
  const answered = controller.session.progress?.questions_answered ?? 0;
  root.querySelectorAll<HTMLButtonElement>(".choice")[index].click();
  await waitFor(
    () =>
      (controller.session.progress?.questions_answered ?? 0) > answered &&
      controller.session.phase !== "checking",
  );
}

describe("live session end to end", () => {
  it("answers until completion and matches the service's own state", async () => {
    const { controller, root, api } = makeUi();
    await controller.loadSections();
    root.querySelector<HTMLButtonElement>(".section-choice")!.click();
    await waitFor(() => controller.session.phase === "question");

    let guard = 0;
    while (controller.session.phase !== "complete" && guard < 20) {
      expect(root.innerHTML).not.toMatch(/difficult/i);
      // the scripted student knows index 0 is right
      await clickChoice(controller, root, 0);
      guard += 1;
    }
    expect(controller.session.phase).toBe("complete");
    // both concepts have two problems; all answers correct -> four questions
    expect(controller.session.progress?.questions_answered).toBe(4);

    const state = await api.getState(controller.session.sessionId!);
    const progress = state.progress as Progress;
    expect(progress.complete).toBe(true);
    expect(progress.questions_answered).toBe(
      controller.session.progress?.questions_answered,
    );
    expect(progress.concepts).toEqual(controller.session.progress?.concepts);
    const summary = root.querySelector(".summary")?.textContent;
    expect(summary).toContain("4 questions answered");
    expect(summary).toContain("2 of 2 concepts mastered");
  });

  it("registers exactly one answer when submit races itself", async () => {
    const { controller, root, api } = makeUi();
    await controller.loadSections();
    await controller.startQuiz("s1");
    const sessionId = controller.session.sessionId!;
    const before = (await api.getState(sessionId)).progress as Progress;

    const button = root.querySelector<HTMLButtonElement>(".choice")!;
    button.click();
    button.click(); // double-click: in-flight guard swallows the duplicate
    await waitFor(
      () =>
        controller.session.progress?.questions_answered ===
          before.questions_answered + 1 &&
        controller.session.phase !== "checking",
    );

    const after = (await api.getState(sessionId)).progress as Progress;
    expect(after.questions_answered).toBe(before.questions_answered + 1);

    // and when a duplicate does reach the wire, the service rejects it
    const next = await api.nextQuestion(sessionId);
    const results = await Promise.allSettled([
      api.submitAnswer(sessionId, next.problem_id, 0),
      api.submitAnswer(sessionId, next.problem_id, 0),
    ]);
    const fulfilled = results.filter((r) => r.status === "fulfilled");
    const rejected = results.filter(
      (r): r is PromiseRejectedResult => r.status === "rejected",
    );
    expect(fulfilled).toHaveLength(1);
    expect(rejected).toHaveLength(1);
    expect((rejected[0].reason as ApiError).status).toBe(409);
    const final = (await api.getState(sessionId)).progress as Progress;
    expect(final.questions_answered).toBe(before.questions_answered + 2);
  });
});

describe("crash replay", () => {
  it("resumes with the identical outstanding question after a restart", async () => {
    const { controller, root } = makeUi();
    await controller.loadSections();
    await controller.startQuiz("s1");
    const sessionId = controller.session.sessionId!;
    // one answered question, next one outstanding
    await clickChoice(controller, root, 0);
    const outstanding = controller.session.question;
    expect(outstanding).not.toBeNull();

    await stopServer(); // hard kill mid-session
    server = startServer();
    await waitReady();

    // a fresh page attaching to the same session sees the same question
    const revived = makeUi();
    await revived.controller.attachSession(sessionId);
    expect(revived.controller.session.phase).toBe("question");
    expect(revived.controller.session.question).toEqual(outstanding);
    expect(
      revived.root.querySelector(".prompt")?.textContent,
    ).toBe(outstanding!.prompt);

    // and the session still plays to completion
    let guard = 0;
    while (revived.controller.session.phase !== "complete" && guard < 20) {
      await clickChoice(revived.controller, revived.root, 0);
      guard += 1;
    }
    expect(revived.controller.session.phase).toBe("complete");
  });
});
