// Bootstrapping: pick a dataset, open a session, wire the two views to the
// events channel.

import { Client, EventsChannel } from "./api.js";
import { FeatureView } from "./features.js";
import { ViewState } from "./state.js";
import { Workspace } from "./workspace.js";

export interface App {
  state: ViewState;
  workspace: Workspace;
  features: FeatureView;
  events: EventsChannel;
}

export async function startApp(
  root: HTMLElement,
  client: Client = new Client(),
  datasetName?: string,
): Promise<App> {
  let dataset = datasetName;
  let hasThumbs = false;
  if (!dataset) {
    const datasets = await client.listDatasets();
    const first = datasets[0];
    if (!first) throw new Error("no datasets registered on the server");
    dataset = first.name;
  }

  const created = await client.createSession(dataset);
  const state = new ViewState(created.session_id, created.payload);

  const workspaceRoot = document.createElement("section");
  workspaceRoot.className = "workspace-pane";
  const featuresRoot = document.createElement("section");
  featuresRoot.className = "features-pane";
  const status = document.createElement("div");
  status.className = "status-line";
  root.append(workspaceRoot, featuresRoot, status);

  const workspace = new Workspace(workspaceRoot, state, client, {
    dataset,
    thumbnails: hasThumbs,
  });
  const features = new FeatureView(featuresRoot, state, client);

  const events = new EventsChannel(client, created.session_id, (event) => {
    state.commitApplied(event.payload);
  });
  events.start();

  state.subscribe((snap) => {
    const staged = snap.stagedDrags.size;
    status.textContent =
      `revision ${snap.lastRevision}` +
      (staged ? ` | ${staged} staged` : "") +
      (snap.pending ? " | solving..." : "") +
      (snap.warning ? ` | ${snap.warning}` : "");
  });

  return { state, workspace, features, events };
}

declare global {
  interface Window {
    olisteerApp?: Promise<App>;
  }
}

if (typeof document !== "undefined" && document.getElementById("olisteer-root")) {
  const params = new URLSearchParams(location.search);
  window.olisteerApp = startApp(
    document.getElementById("olisteer-root") as HTMLElement,
    new Client(""),
    params.get("dataset") ?? undefined,
  );
}
