import Ajv, { ValidateFunction } from 'ajv';

import answerSchema from './schemas/answer_response.json';
import catalogSchema from './schemas/catalog_response.json';
import errorSchema from './schemas/error_response.json';
import healthSchema from './schemas/health_response.json';
import { AnswerResponse, ApiError, CatalogResponse, HealthResponse } from './types';

// Responses are validated against the schemas bundled with the service
// before anything reaches the UI; a response that fails validation is
// treated as a transport error rather than rendered.
const ajv = new Ajv({ allErrors: true });
const validateCatalog = ajv.compile(catalogSchema);
const validateAnswer = ajv.compile(answerSchema);
const validateHealth = ajv.compile(healthSchema);
const validateError = ajv.compile(errorSchema);

export class ApiRequestError extends Error {
  constructor(public code: string, message: string) {
    super(message);
    this.name = 'ApiRequestError';
  }
}

export class SchemaViolationError extends Error {
  constructor(endpoint: string, detail: string) {
    super(`response from ${endpoint} violates its schema: ${detail}`);
    this.name = 'SchemaViolationError';
  }
}

function checked<T>(endpoint: string, validate: ValidateFunction, body: unknown): T {
  if (!validate(body)) {
    throw new SchemaViolationError(endpoint, ajv.errorsText(validate.errors));
  }
  return body as T;
}

async function parseError(endpoint: string, res: Response): Promise<never> {
  let body: unknown;
  try {
    body = await res.json();
  } catch {
    throw new ApiRequestError('transport_error', `HTTP ${res.status} from ${endpoint}`);
  }
  const err = checked<ApiError>(endpoint, validateError, body);
  throw new ApiRequestError(err.code, err.message);
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async catalog(text: string, signal?: AbortSignal): Promise<CatalogResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/api/catalog`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ text }),
      signal,
    });
    if (!res.ok) await parseError('/api/catalog', res);
    return checked<CatalogResponse>('/api/catalog', validateCatalog, await res.json());
  }

  async answer(text: string, question: string, signal?: AbortSignal): Promise<AnswerResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/api/answer`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ text, question }),
      signal,
    });
    if (!res.ok) await parseError('/api/answer', res);
    return checked<AnswerResponse>('/api/answer', validateAnswer, await res.json());
  }

  async health(): Promise<HealthResponse> {
    const res = await this.fetchFn(`${this.baseUrl}/api/health`, { method: 'GET' });
    if (!res.ok) await parseError('/api/health', res);
    return checked<HealthResponse>('/api/health', validateHealth, await res.json());
  }
}
