from memcluster.gateway.client import CallRecord, ChatClient, ChatCompletionsClient, complete
from memcluster.gateway.oracle import MergeEvent, OracleClient, OracleScript, oracle_complete
from memcluster.gateway.parsing import parse_response, render_merge, render_response
from memcluster.gateway.retry import classify_with_retry

__all__ = [
    "CallRecord",
    "ChatClient",
    "ChatCompletionsClient",
    "MergeEvent",
    "OracleClient",
    "OracleScript",
    "classify_with_retry",
    "complete",
    "oracle_complete",
    "parse_response",
    "render_merge",
    "render_response",
]
