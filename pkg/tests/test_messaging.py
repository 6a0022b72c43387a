import hashlib
import hmac

import pytest

from peerclass.auth import sign_action, verify_action
from peerclass.clock import utc
from peerclass.errors import NotFoundError, UnauthorizedError, ValidationError
from peerclass.messaging import HOME_TARGET, Mailer, OPEN_SLOT, _substitute, load_templates
from peerclass.store import InteractionKind, Repository

T0 = utc(2024, 1, 1)
SECRET = b"test-secret"


def make_mailer():
    repo = Repository()
    return repo, Mailer(repo, secret=SECRET, base_url="http://x.test")


class TestTemplates:
    def test_all_templates_load_with_subject_and_body(self):
        templates = load_templates()
        expected = {
            "welcome", "review_request", "teacher_ack", "class_approved", "class_rejected",
            "teacher_promo_1", "teacher_promo_2", "teacher_promo_3",
            "target_promo_1", "target_promo_2", "target_promo_3",
            "logistics_14d", "logistics_7d", "logistics_3d", "logistics_1d",
            "join_now", "recording_share", "ratings_request", "next_recs",
        }
        assert expected <= set(templates)
        for subject, body in templates.values():
            assert subject
            assert body

    def test_substitute_exact(self):
        assert _substitute("Hi {{a}}, meet {{b}}!", {"a": "X", "b": "Y"}) == "Hi X, meet Y!"

    def test_substitute_missing_placeholder(self):
        with pytest.raises(ValidationError):
            _substitute("Hi {{a}}", {})

    def test_substitute_unterminated(self):
        with pytest.raises(ValidationError):
            _substitute("Hi {{a", {"a": "X"})


class TestRender:
    def test_unknown_template(self):
        _, mailer = make_mailer()
        with pytest.raises(NotFoundError):
            mailer.render("no_such_template", "a@x.org", {})

    def test_tokens_are_deterministic_hmac(self):
        repo, mailer = make_mailer()
        entry = mailer.render(
            "welcome",
            "kid@x.org",
            {"student_name": "Ada", "class_title": "T", "class_description": "D", "first_session": "soon"},
            links={"class_page": "/classes/cl-1"},
            now=T0,
        )
        # independent oracle for the token derivation
        for slot, token in entry.tracking_tokens.items():
            expected = hmac.new(SECRET, f"{entry.entry_id}:{slot}".encode(), hashlib.sha256).hexdigest()[:16]
            assert token == expected
        assert set(entry.tracking_tokens) == {"class_page", OPEN_SLOT}

    def test_body_has_no_raw_slots_and_has_pixel(self):
        repo, mailer = make_mailer()
        entry = mailer.render(
            "welcome",
            "kid@x.org",
            {"student_name": "Ada", "class_title": "T", "class_description": "D", "first_session": "soon"},
            links={"class_page": "/classes/cl-1"},
            now=T0,
        )
        assert "[[link:" not in entry.body
        assert "{{" not in entry.body
        assert f"http://x.test/t/{entry.tracking_tokens[OPEN_SLOT]}" in entry.body
        assert f"http://x.test/t/{entry.tracking_tokens['class_page']}" in entry.body

    def test_missing_link_target_rolls_back(self):
        repo, mailer = make_mailer()
        before = repo.dump()
        with pytest.raises(ValidationError):
            mailer.render(
                "welcome",
                "kid@x.org",
                {"student_name": "Ada", "class_title": "T", "class_description": "D", "first_session": "soon"},
                links={},
                now=T0,
            )
        assert repo.dump() == before


class TestResolveClick:
    def _entry(self):
        repo, mailer = make_mailer()
        entry = mailer.render(
            "welcome",
            "kid@x.org",
            {"student_name": "Ada", "class_title": "T", "class_description": "D", "first_session": "soon"},
            links={"class_page": "/classes/cl-1"},
            now=T0,
        )
        return repo, mailer, entry

    def test_click_resolves_to_target_and_logs(self):
        repo, mailer, entry = self._entry()
        target, kind = mailer.resolve_click(entry.tracking_tokens["class_page"], now=T0)
        assert target == "/classes/cl-1"
        assert kind == InteractionKind.EMAIL_CLICK
        events = repo.interactions_for_user("kid@x.org")
        assert [e.kind for e in events] == [InteractionKind.EMAIL_CLICK]

    def test_open_pixel_logs_open(self):
        repo, mailer, entry = self._entry()
        target, kind = mailer.resolve_click(entry.tracking_tokens[OPEN_SLOT], now=T0)
        assert target == ""
        assert kind == InteractionKind.EMAIL_OPEN
        assert [e.kind for e in repo.interactions_for_user("kid@x.org")] == [InteractionKind.EMAIL_OPEN]

    def test_unknown_token_is_anonymous_home(self):
        repo, mailer, _ = self._entry()
        target, kind = mailer.resolve_click("deadbeefdeadbeef", now=T0)
        assert target == HOME_TARGET
        assert kind == InteractionKind.PAGE_CLICK
        assert repo.interactions_for_user("anon:deadbeefdeadbeef")


class TestActionTokens:
    def test_round_trip(self):
        token = sign_action(SECRET, "review", "ce-1", utc(2024, 2, 1))
        verify_action(SECRET, token, "review", "ce-1", T0)

    def test_expired(self):
        token = sign_action(SECRET, "review", "ce-1", utc(2023, 12, 1))
        with pytest.raises(UnauthorizedError):
            verify_action(SECRET, token, "review", "ce-1", T0)

    def test_wrong_entity_and_action(self):
        token = sign_action(SECRET, "review", "ce-1", utc(2024, 2, 1))
        with pytest.raises(UnauthorizedError):
            verify_action(SECRET, token, "review", "ce-2", T0)
        with pytest.raises(UnauthorizedError):
            verify_action(SECRET, token, "confirm", "ce-1", T0)

    def test_tampered_signature(self):
        token = sign_action(SECRET, "review", "ce-1", utc(2024, 2, 1))
        head, _, sig = token.rpartition(".")
        bad = head + "." + ("A" if sig[0] != "A" else "B") + sig[1:]
        with pytest.raises(UnauthorizedError):
            verify_action(SECRET, bad, "review", "ce-1", T0)

    def test_malformed(self):
        with pytest.raises(UnauthorizedError):
            verify_action(SECRET, "nonsense", "review", "ce-1", T0)
