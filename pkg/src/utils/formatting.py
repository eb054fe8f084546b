import json


def format_success_response(data: dict) -> str:
    """Format a successful command result."""
    result = {"success": True, **data}
    return json.dumps(result, indent=2, sort_keys=False)


def format_error_response(error_code: int | str, message: str, **kwargs) -> str:
    """Format an error result."""
    result = {"success": False, "error": error_code, "message": message, **kwargs}
    return json.dumps(result, indent=2)
