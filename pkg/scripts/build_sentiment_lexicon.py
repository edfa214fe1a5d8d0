#!/usr/bin/env python3
"""Regenerate src/commitscope/data/sentiment_lexicon.tsv.

Words are grouped by (polarity, subjectivity) grade; inflected forms are
listed explicitly so no bogus conjugations sneak in. Run from the repo root:

    python scripts/build_sentiment_lexicon.py
"""

from pathlib import Path

# (polarity, subjectivity, words)
GROUPS = [
    # --- strongly positive -------------------------------------------------
    (1.0, 1.0, """
        excellent excellently excellence perfect perfectly perfection flawless
        flawlessly outstanding outstandingly superb superbly brilliant
        brilliantly magnificent magnificently exceptional exceptionally stellar
        phenomenal phenomenally best finest masterpiece masterful
    """),
    (0.9, 0.9, """
        amazing amazingly fantastic fantastically wonderful wonderfully
        terrific awesome awesomely marvelous marvelously fabulous fabulously
        splendid splendidly glorious gloriously incredible incredibly
        spectacular spectacularly dazzling delightful delightfully delighted
        beautiful beautifully gorgeous stunning breathtaking superlative
        exquisite sublime
    """),
    (0.7, 0.8, """
        great greatly impressive impressively elegant elegantly elegance
        admirable admirably commendable praiseworthy exemplary remarkable
        remarkably superior outclasses pleasant pleasantly enjoyable
        satisfying gratifying rewarding lovely loved love loves loving adore
        adored thrilled thrilling excited exciting excitement happy happily
        happiness joy joyful glad gladly delight pleased pleasing impress
        impressed impresses
    """),
    (0.6, 0.7, """
        good nice nicely solid solidly robust robustly robustness reliable
        reliably reliability dependable trustworthy efficient efficiently
        efficiency effective effectively effectiveness useful usefully
        usefulness helpful helpfully valuable invaluable beneficial smooth
        smoothly fast speedy swift swiftly quick quickly snappy zippy nimble
        performant powerful powerfully intuitive intuitively
        friendly slick sleek polished graceful gracefully neat neatly tidy
        clean cleanly cleaner cleanest crisp lean succeed succeeds succeeded
        succeeding success successes successful successfully win wins winning
        won victory smart smartly clever cleverly wise wisely thoughtful
        generous kind
    """),
    (0.5, 0.5, """
        secure securely safe safely safety stable stably stability consistent
        consistently consistency accurate accurately accuracy precise
        precisely precision correct correctly correctness proper properly
        sound sane sanely healthy resilient resilience sturdy durable portable
        maintainable readable legible testable reusable extensible scalable
        scalability flexible flexibly flexibility modular composable coherent
        deterministic predictable ergonomic idiomatic canonical
    """),
    (0.4, 0.5, """
        improve improves improved improving improvement improvements enhance
        enhances enhanced enhancing enhancement enhancements optimize
        optimizes optimized optimizing optimization optimizations simplify
        simplifies simplified simplifying simplification streamline
        streamlines streamlined streamlining modernize modernizes modernized
        modernizing modernization upgrade upgrades upgraded upgrading boost
        boosts boosted boosting accelerate accelerates accelerated
        accelerating acceleration speedup speedups strengthen strengthens
        strengthened strengthening harden hardens hardened hardening stabilize
        stabilizes stabilized stabilizing refine refines refined refining
        refinement polish polishes polishing tune tunes tuned tuning benefit
        benefits benefited beneficially gain gains gained progress progresses
        progressed resolve resolves resolved resolving resolution heal heals
        healed recover recovers recovered recovery rescue rescued salvage
        salvaged
    """),
    (0.35, 0.6, """
        thank thanks thanked thankful thankfully appreciate appreciates
        appreciated appreciation grateful gratefully kudos congrats
        congratulations welcome welcomed cheers praise praised praising hooray
        yay bravo neato sweet cool coolest
    """),
    (0.3, 0.4, """
        easy easier easiest easily simple simpler simplest straightforward
        painless effortless effortlessly convenient conveniently convenience
        handy seamless seamlessly natural naturally compact concise concisely
        succinct tidier cleanup cleanups fresh freshly modern newer nicer
        safer smarter smoother simplistic
    """),
    (0.2, 0.3, """
        fix fixes fixed fixing fixup fixups repair repairs repaired repairing
        correcting corrected corrects stabilise stabilised refactor refactors
        refactored refactoring rework reworked reworking revamp revamped
        revamping declutter decluttered deduplicate deduplicated
        unify unified unifies unifying consolidate consolidates consolidated
        consolidating harmonize harmonized normalize normalized normalizes
        normalizing
    """),
    # --- intensifiers and hedges (weak polarity, high subjectivity) --------
    (0.1, 0.9, """
        really truly definitely certainly surely absolutely genuinely
        honestly frankly hopefully ideally surprisingly
        interestingly curiously notably admittedly
    """),
    (0.0, 0.8, """
        quite rather fairly somewhat slightly moderately reasonably relatively
        arguably apparently seemingly presumably supposedly probably possibly
        perhaps maybe approximately basically essentially
        practically virtually mostly largely generally typically usually
        obviously evidently allegedly
    """),
    (-0.1, 0.9, """
        unfortunately sadly regrettably frustratingly worryingly
        alarmingly suspiciously mysteriously inexplicably bizarrely oddly
        strangely weirdly
    """),
    # --- mildly negative ----------------------------------------------------
    (-0.2, 0.35, """
        deprecated deprecate deprecates deprecating deprecation legacy stale
        outdated obsolete obsoleted redundant superfluous verbose noisy quirk
        quirks quirky niggle niggles nit nits nitpick nitpicks workaround
        workarounds stopgap bandaid rough roughly unpolished incomplete
        unfinished partial partially limited limitation limitations
        shortcoming shortcomings caveat caveats
    """),
    (-0.4, 0.5, """
        bug bugs buggy bugfix bugfixes error errors erroneous erroneously
        wrong wrongly incorrect incorrectly invalid invalidated mistake
        mistakes mistaken mistakenly flaw flaws flawed faulty defect defects
        defective malformed misbehaving misbehaves misbehavior mismatch
        mismatches mismatched problem problems problematic trouble troubles
        troublesome troubling glitch glitches glitchy hiccup hiccups anomaly
        anomalies anomalous inconsistent inconsistently inconsistency
        inconsistencies unexpected unexpectedly surprising spurious bogus
        misleading confusing confuse confuses confused confusion unclear
        cryptic obscure obscured ambiguous ambiguity puzzling baffling weird
        strange odd abnormal abnormally regress regresses regressed regression
        regressions deficient deficiency deficiencies inadequate insufficient
        subpar suboptimal
    """),
    (-0.4, 0.6, """
        slow slower slowest slowly slowness sluggish sluggishly laggy lag lags
        lagging janky jank wonky clunky clumsy awkward awkwardly cumbersome
        unwieldy tedious tediously tedium inefficient inefficiently
        inefficiency wasteful wastefully bloat bloated bloating brittle
        fragile fragility flaky flakiness unstable instability unreliable
        unreliably tricky trickier hairy gnarly convoluted tangled spaghetti
        crufty cruft messy mess messes sloppy sloppily careless carelessly
        crude crudely hacky hack hacks kludge kludges kludgy shoddy slipshod
        haphazard haphazardly chaotic chaotically
    """),
    (-0.5, 0.35, """
        crash crashes crashed crashing hang hangs hanging hung freeze freezes
        froze frozen freezing stall stalls stalled stalling stuck deadlock
        deadlocks deadlocked livelock corrupt corrupts corrupted corrupting
        corruption leak leaks leaked leaking leaky fail fails failed failing
        failure failures fault faults broken breakage breakages breaks
        breaking broke clobber clobbers clobbered truncated mangled garbled
        lost loses losing loss segfault segfaults panics panic panicked
        abort aborts aborted aborting
    """),
    (-0.6, 0.6, """
        bad badly worse severe severely serious seriously critical critically
        grave gravely dangerous dangerously danger dangers risky riskier risk
        risks hazardous unsafe insecure insecurely vulnerable vulnerability
        vulnerabilities exploitable annoying annoy annoys annoyed annoyance
        annoyances irritating irritate irritated irritation frustrating
        frustrate frustrates frustrated frustration painful painfully pain
        pains burdensome ugly uglier nasty nastier unusable unworkable
        unmaintainable unreadable untestable hostile harmful harm harms harmed
        damaging damage damages damaged regrettable unacceptable intolerable
        useless pointless worthless futile hopeless helpless
    """),
    (-0.8, 0.9, """
        terrible terribly horrible horribly awful awfully dreadful dreadfully
        atrocious abysmal abysmally disastrous disastrously disaster disasters
        catastrophic catastrophe catastrophes nightmare nightmares nightmarish
        horrendous horrid appalling appallingly deplorable dire grim bleak
        woeful woefully pathetic pathetically pitiful feeble stupid stupidly
        stupidity dumb idiotic insane insanely crazy ridiculous ridiculously
        absurd absurdly ludicrous outrageous outrageously embarrassing
        embarrassingly shameful shamefully miserable miserably wretched
        garbage junk trash crap crappy lousy evil hate hates hated hating
        hateful disgusting disgusted despise despised loathe loathed
    """),
    (-1.0, 0.8, """
        fatal fatally catastrophically worst unrecoverable irrecoverable
        irreparable devastating devastated devastation destroy destroys
        destroyed destroying destruction brick bricked hosed borked busted
        kaput
    """),
    # --- second tranche: positive -------------------------------------------
    (0.7, 0.8, """
        accomplish accomplished accomplishes accomplishing accomplishment
        accomplishments achieve achieves achieved achieving achievement
        achievements triumph triumphant tremendous tremendously sensational
        magical majestic miraculous legendary revolutionary groundbreaking
        inspiring inspired uplifting heartening refreshing reassuring
        wondrous radiant sparkling shining immaculate pristine spotless
        unbeatable unmatched unparalleled unrivaled supreme premier ingenious
        innovative innovation innovations visionary
    """),
    (0.5, 0.6, """
        capable competent proficient skilled skillful talented gifted adept
        excel excels excelled excelling thrive thrives thrived thriving
        surpass surpasses surpassed flourish flourished prosper prospered
        empower empowers empowered empowering encourage encourages encouraged
        encouraging enrich enriches enriched enriching motivate motivated
        motivating stimulating engaging compelling captivating interesting
        promising favorable favorite popular celebrated acclaimed respected
        respectable prestigious distinguished honored honorable worthy
        worthwhile deserving desirable enviable laudable noteworthy notable
        meaningful memorable satisfactory satisfied sufficient suitable
        fitting appropriate decent fine finer
    """),
    (0.4, 0.5, """
        thorough thoroughly rigorous rigorously diligent diligently meticulous
        meticulously comprehensive comprehensively careful carefully prudent
        prudently sensible sensibly rational rationally pragmatic practical practicality
        lucid lucidly articulate eloquent expressive
        coherently balanced organized disciplined systematic systematically
        methodical steady steadfast stalwart vigilant attentive
        prompt promptly timely punctual rapid rapidly brisk briskly agile
        energetic dynamic vibrant lively vivid upbeat optimistic confident
        confidently hopeful eager eagerly keen keenly enthusiastic
        enthusiastically earnest earnestly sincere sincerely genuine
        authentic faithful faithfully loyal honest honesty
        truthful credible trustworthiness
    """),
    (0.3, 0.5, """
        warm warmly gentle gently kindly courteous gracious welcoming
        supportive cooperative collaborative constructive instructive
        educational insightful enlightening illuminating clarifying clarify
        clarifies clarified helpfulness generosity goodwill gratitude proud
        proudly fortunate fortunately lucky luckily blessed cheerful cheery
        merry festive fun funny amusing entertaining playful witty
        pleasantness comfort comfortable comfortably cozy
        painlessly frictionless breeze breezy usable
        usability accessible approachable affordable economical
        economically productive productively fruitful fulfilling
        bulletproof watertight airtight foolproof
    """),
    (0.2, 0.4, """
        sharp sharper sharpest bright brighter brightest shiny golden grand
        rich richer mighty strong strongest sturdier firm firmly
        tight tighter crisper speedier quicker quickest
        leanest lighter lightweight compactly minimal minimalistic
        sophisticated mature matured contemporary
    """),
    # --- second tranche: negative -------------------------------------------
    (-0.3, 0.4, """
        complicated complication complications overcomplicated
        overengineered overdue overkill overly unnecessary unnecessarily
        redundantly superfluously excessive excessively extraneous
        expensive costly costlier prohibitive prohibitively heavyweight
        bottleneck bottlenecks bottlenecked degrade degrades degraded
        degrading degradation downgrade downgraded downgrades deteriorate
        deteriorated deteriorates deteriorating deterioration decay decayed
        decaying stagnant lackluster lacking lacks meager rudimentary
        substandard inferior imperfect imprecise inaccurate inaccurately
        improper improperly unsound unsupported untested undocumented
        unhandled uncaught unavailable unresponsive missing
        misplaced misaligned misconfigured misconfiguration mislabeled
        misuse misused misuses mishandle mishandled mishandles misread
        misinterpret misinterpreted misinterprets mysterious unexplained
        uncertain vague vaguely murky opaque questionable dubious doubtful
        doubt doubts suspect suspicious intermittent intermittently sporadic
        sporadically erratic erratically unpredictable unintended
        unintentional unintentionally inadvertent inadvertently naive naively
        premature prematurely hasty hastily rash rushed sloppier
    """),
    (-0.4, 0.4, """
        malfunction malfunctions malfunctioned malfunctioning breach breaches
        breached violate violates violated violation violations threat
        threats threatening malicious maliciously compromised tainted
        exploitability overrun overruns thrash thrashes
        thrashing starvation starved lockup lockups outage outages downtime
        collapse collapses collapsed crippled crippling paralyzing disrupt
        disrupts disrupted disrupting disruption disruptive interfere
        interferes interfered interference impair impaired impairs impede
        impedes impeded hinder hinders hindered hindering hindrance obstacle
        obstacles snag snags snagged pitfall pitfalls quagmire
        plague plagued plagues smell smells smelly rot rotten rotting racy
        zombie zombies spam spammy hardcode hardcoded hardcoding
    """),
    (-0.5, 0.7, """
        poor poorly weak weakly weakness weaknesses flimsy shaky
        shabby sketchy spotty skewed rigid inflexible restrictive draconian
        clumsier awkwardness unwieldiness tediousness drudgery
        boring bothersome repetitive monotonous dreary dull bland
        uninspired uninspiring unimpressive disappointing disappoint
        disappoints disappointed disappointment disarray disorganized
        disorder muddled jumbled incoherent incomprehensible
        indecipherable illegible illogical irrational nonsense nonsensical
        gibberish meaningless fruitless unproductive
        counterproductive ineffective inelegant inept
        incompetent incapable unqualified amateurish unprofessional
        negligent neglect neglected neglects oversight oversights overlook
        overlooked overlooks blunder blunders blundering bungle bungled
        bungling fumbled gaffe fiasco debacle botch botched botches
        screwed messed struggle struggles struggled struggling stumble
        stumbles stumbled stumbling falter falters faltered floundering
    """),
    (-0.6, 0.7, """
        horrific hideous ghastly grotesque foul gross grossly
        filthy dirty rubbish lame crummy cheesy tacky sour bitter
        harsh harshly brutal brutally
        alarming alarm alarms alarmed worrisome worry worries worried worrying
        concerning concern concerns concerned distressing disturbing ominous
        scary frightening fearsome dreaded dread menacing
        perilous precarious treacherous hazardously
        desperate desperately crisis crises emergency urgent urgently
        havoc chaos mayhem turmoil upheaval wreck wrecked wreckage ruin ruined
        ruins ruining destroyer sabotage sabotaged doom doomed cursed
        hopelessness despair dismay dismal bleakness misery
        suffering suffer suffers suffered agonizing agonizingly agony
        excruciating excruciatingly unbearable insufferable intolerably
        infuriating infuriated maddening exasperating exasperated vexing
        vexed aggravating aggravated aggravates nuisance pesky obnoxious
        jarring grating unpleasant unpleasantly uncomfortable uncomfortably
        unhappy unhappily upset upsetting unfriendly unhelpful unfortunate
        unwanted undesirable unacceptably egregious egregiously blatant
        blatantly glaring glaringly notorious notoriously rampant reckless
        recklessly irresponsibly shortsighted misguided foolish foolishly
        inane asinine moronic brainless mindless thoughtless
        toxic poisonous
    """),
    # --- third tranche ------------------------------------------------------
    (0.6, 0.8, """
        admire admired admires admiring adoration applaud applauded applauds
        applause approve approved approves approving approval blissful bliss
        cherish cherished cherishes classy comfy commend commended commends
        compliment complimented compliments ecstatic elated euphoric exuberant
        gleaming glee gleeful heartwarming heavenly impeccable irresistible
        jubilant joyous joyously lovable lovingly luminous marvel marveled
        marvels masterfully mesmerizing nifty peppy perky pleasurable plush
        posh prized rejoice rejoiced rejoices relish relished resplendent
        rousing satisfyingly savvy seamlessness serene shrewd smashing snazzy
        soothing spiffy stupendous stylish sunny swell thrill thrills
        transcendent treasured triumphantly unblemished unfailing venerable
        victoriously vivacious warmhearted wholehearted wholeheartedly
        winsome wowed wows yummy zesty
    """),
    (0.4, 0.4, """
        battletested bugfree ergonomics futureproof maintainability
        readability testability typesafe idiomatically composability
        discoverability observability debuggability portability durability
        extensibility interoperability
    """),
    (-0.6, 0.8, """
        abhor abhorred abhors abominable agonize agonized anguish anguished
        appalled atrociously bemoan bemoaned berate berated bitterly calamity
        calamitous clunker condemn condemned condemns contempt contemptible
        cringe cringed cringes cringeworthy damning decrepit dejected
        demoralizing deplorably despicable detest detested detestable detests
        diabolical disdain disgraceful disgrace dishearten disheartened
        disheartening displeased displeasure distasteful dour enraged enrages
        fuming furious furiously grievous grievously grouchy heinous horrify
        horrified horrifying hostility humiliating humiliation icky irate
        irksome lamentable lamentably loathing loathsome maddeningly
        malignant nauseating objectionable odious outraged pitifully
        regretful regretted regrets repugnant repulsive resent resented
        resentment revolting ruinous scornful shockingly shoddily sickening
        sinister unforgivable wretchedly
    """),
    (-0.4, 0.45, """
        antipattern antipatterns backfire backfired backfires bitrot blocker
        blockers brokenness crashy flakier footgun footguns heisenbug
        heisenbugs jankiness showstopper showstoppers slowdown slowdowns
        unfixable misfire misfires misfired thrashed fragmenting churn
        churning nondeterministic irreproducible unreproducible
    """),
]

OUT = Path(__file__).resolve().parents[1] / "src" / "commitscope" / "data" / "sentiment_lexicon.tsv"


def main() -> None:
    entries: dict[str, tuple[float, float]] = {}
    duplicates = []
    for polarity, subjectivity, block in GROUPS:
        for word in block.split():
            word = word.strip().lower()
            if not word.isalpha():
                raise SystemExit(f"non-alphabetic lexicon word: {word!r}")
            if word in entries:
                duplicates.append(word)
                continue
            entries[word] = (polarity, subjectivity)
    if duplicates:
        raise SystemExit(f"duplicate lexicon words: {sorted(set(duplicates))}")
    with open(OUT, "w", encoding="utf-8") as fh:
        for word in sorted(entries):
            polarity, subjectivity = entries[word]
            fh.write(f"{word}\t{polarity:.2f}\t{subjectivity:.2f}\n")
    print(f"wrote {len(entries)} words to {OUT}")


if __name__ == "__main__":
    main()
